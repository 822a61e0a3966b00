#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "geodc/config.hpp"
#include "geodc/errors.hpp"
#include "geodc/runner.hpp"

int main(int argc, char** argv) {
    using namespace geodc;
    CLI::App app{"Geo-distributed data-center scheduling simulator"};
    std::string sim_path;
    std::string dc_path;
    std::string reward_path;
    std::string strategy;
    std::vector<std::uint64_t> seeds;
    int days = 0;
    std::string out_dir = "results";
    bool quiet = false;

    app.add_option("--sim-config", sim_path, "simulation YAML")->required()->check(CLI::ExistingFile);
    app.add_option("--dc-config", dc_path, "datacenters YAML")->required()->check(CLI::ExistingFile);
    app.add_option("--reward-config", reward_path, "reward YAML (default weights if omitted)")
        ->check(CLI::ExistingFile);
    app.add_option("--strategy", strategy, "override the configured strategy");
    auto* seed_opt = app.add_option("--seed", seeds, "single seed");
    app.add_option("--seeds", seeds, "seeds for a sweep")->excludes(seed_opt)->delimiter(',');
    app.add_option("--days", days, "override duration_days")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("-q,--quiet", quiet, "only log warnings");
    CLI11_PARSE(app, argc, argv);

    if (quiet) spdlog::set_level(spdlog::level::warn);
    if (seeds.empty()) seeds.push_back(0);

    try {
        auto configs = config::load_configs(sim_path, dc_path, reward_path);
        if (!strategy.empty()) configs.sim.strategy = strategy;
        if (days > 0) configs.sim.duration_days = days;
        config::validate(configs.sim);
        const auto sweep = runner::run_sweep(configs, seeds, out_dir);
        for (std::size_t k = 0; k < runner::kKpiNames.size(); ++k) {
            const auto& s = sweep.summary[k];
            std::cout << runner::kKpiNames[k] << ": " << s.mean << " +/- " << s.std << '\n';
        }
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return 3;
    }
    return 0;
}
