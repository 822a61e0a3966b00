#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geodc/controllers.hpp"
#include "geodc/network.hpp"
#include "geodc/physics.hpp"
#include "geodc/rewards.hpp"
#include "geodc/schedenv.hpp"
#include "geodc/workload.hpp"

namespace geodc::config {

struct SyntheticProfile {
    double base = 0.0;
    double amplitude = 0.0;
    double noise_sd = 0.0;
};

/// Either a file or a synthetic profile.
struct SeriesSource {
    std::optional<std::filesystem::path> file;
    SyntheticProfile synthetic;
};

struct WeatherSource {
    std::optional<std::filesystem::path> file;
    SyntheticProfile drybulb{20.0, 5.0, 0.0};
    SyntheticProfile humidity{50.0, 10.0, 0.0};
};

enum class HvacMode { Fixed, Deadband };

struct HvacSpec {
    HvacMode mode = HvacMode::Fixed;
    double setpoint_c = 22.0;
    double deadband_lo = 24.0;
    double deadband_hi = 26.0;
};

struct DatacenterSpec {
    int dc_id = 0;
    std::string location;
    int timezone_shift_h = 0;
    double population_weight = 1.0;
    double total_cores = 0.0;
    double total_gpus = 0.0;
    double total_mem_gb = 0.0;
    std::filesystem::path dc_config_file;
    bool hru_enabled = false;
    HvacSpec hvac;
    SeriesSource price{std::nullopt, {60.0, 15.0, 0.0}};
    SeriesSource carbon{std::nullopt, {300.0, 50.0, 0.0}};
    WeatherSource weather;
};

struct SyntheticWorkload {
    double mean_tasks_per_interval = 5.0;
    workload::ResourceRanges ranges;
};

struct SimConfig {
    int year = 2023;
    int month = 7;
    int init_day = 1;
    int init_hour = 0;
    int duration_days = 1;
    int timestep_minutes = 15;
    std::optional<std::filesystem::path> workload_path;
    SyntheticWorkload synthetic_workload;
    std::string cloud_provider = "custom";
    std::filesystem::path network_dir;
    std::optional<std::filesystem::path> cost_matrix_path;
    std::optional<std::filesystem::path> region_map_path;
    std::optional<std::filesystem::path> delay_params_path;
    double intra_throughput_mbps = 1000.0;
    double intra_rtt_ms = 10.0;
    bool shuffle_datacenters = false;
    std::string strategy = "local_only";
    bool single_action_mode = false;
    bool disable_defer_action = false;

    [[nodiscard]] Instant start() const;
    [[nodiscard]] TimeWindow window() const;
};

/// Relative paths inside a config file resolve against that file's directory.
SimConfig load_sim_config(const std::filesystem::path& path);
std::vector<DatacenterSpec> load_datacenters(const std::filesystem::path& path);

/// Throws ConfigError when a field breaks an invariant.
void validate(const SimConfig& sim);

struct Configs {
    SimConfig sim;
    std::vector<DatacenterSpec> datacenters;
    rewards::RewardConfig reward = rewards::default_reward_config();
};

/// Loads all three files. `reward_path` may be empty for the default weights.
Configs load_configs(const std::filesystem::path& sim_path, const std::filesystem::path& dc_path,
                     const std::filesystem::path& reward_path);

network::Network load_network(const SimConfig& sim);

/// Seed substreams for synthetic inputs.
inline constexpr std::uint64_t kWorkloadStream = 3;
inline constexpr std::uint64_t kSeriesStreamBase = 100;

/// Builds a fresh cluster and trace per seed. Files are read once here;
/// synthetic series and workloads are regenerated from the seed.
schedenv::ScenarioFactory make_scenario_factory(const Configs& configs);

/// HVAC policies in datacenter order.
std::vector<std::unique_ptr<controllers::HvacPolicy>> make_hvac_policies(const Configs& configs);

}  // namespace geodc::config
