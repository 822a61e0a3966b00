#include "geodc/runner.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "geodc/csv.hpp"
#include "geodc/errors.hpp"
#include "geodc/schedenv.hpp"

namespace geodc::runner {

namespace {

constexpr std::array<std::string_view, 18> kGlobalColumns = {
    "step",
    "time",
    "total_energy_cost_usd",
    "total_energy_kwh",
    "total_co2_kg",
    "total_water_l",
    "sla_met",
    "sla_violated",
    "avg_cpu_util_pct",
    "avg_gpu_util_pct",
    "avg_mem_util_pct",
    "transmission_cost_usd",
    "transmission_energy_kwh",
    "transmission_emissions_kg",
    "tasks_deferred",
    "sla_overrides",
    "remote_assignments",
    "reward",
};

constexpr std::array<std::string_view, 19> kDcColumns = {
    "energy_kwh", "energy_cost_usd", "carbon_kg",    "water_l",          "sla_met",
    "sla_violated", "cpu_util_pct", "gpu_util_pct",  "mem_util_pct",     "running",
    "pending",    "started",         "assigned",     "it_power_w",       "hvac_power_w",
    "setpoint_c", "return_temp_c",   "price_usd_per_mwh", "ci_g_per_kwh",
};

struct Means {
    double cpu = 0.0;
    double gpu = 0.0;
    double mem = 0.0;
};

Means util_means(const cluster::ClusterInfo& info) {
    Means m;
    if (info.dcs.empty()) return m;
    for (const auto& d : info.dcs) {
        m.cpu += d.cpu_util_pct;
        m.gpu += d.gpu_util_pct;
        m.mem += d.mem_util_pct;
    }
    const auto n = static_cast<double>(info.dcs.size());
    return Means{m.cpu / n, m.gpu / n, m.mem / n};
}

double total_energy_kwh(const cluster::ClusterInfo& info) {
    return info.total_dc_energy_kwh() + info.transmission_energy_total_kwh;
}

double total_co2_kg(const cluster::ClusterInfo& info) {
    return info.total_dc_emissions_kg() + info.transmission_emissions_total_kg;
}

std::string f(double v) { return format_double(v); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

nlohmann::json kpi_object(const KpiRow& row) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) j[std::string(kKpiNames[k])] = row[k];
    return j;
}

}  // namespace

std::vector<std::string> step_log_columns(const std::vector<int>& dc_ids) {
    std::vector<std::string> cols(kGlobalColumns.begin(), kGlobalColumns.end());
    for (int id : dc_ids) {
        for (auto c : kDcColumns) {
            cols.push_back("dc" + std::to_string(id) + "_" + std::string(c));
        }
    }
    return cols;
}

std::string format_step_log(const std::vector<StepRecord>& steps) {
    std::ostringstream out;
    out << kStepLogSchema << '\n';
    std::vector<int> ids;
    if (!steps.empty()) {
        for (const auto& d : steps.front().info.dcs) ids.push_back(d.dc_id);
    }
    const auto cols = step_log_columns(ids);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& s : steps) {
        const auto& in = s.info;
        const Means m = util_means(in);
        out << in.step << ',' << format_iso8601(in.time) << ',' << f(in.total_energy_cost_usd()) << ','
            << f(total_energy_kwh(in)) << ',' << f(total_co2_kg(in)) << ',' << f(in.total_water_l()) << ','
            << in.total_sla_met() << ',' << in.total_sla_violated() << ',' << f(m.cpu) << ',' << f(m.gpu) << ','
            << f(m.mem) << ',' << f(in.transmission_cost_total_usd) << ',' << f(in.transmission_energy_total_kwh)
            << ',' << f(in.transmission_emissions_total_kg) << ',' << in.tasks_deferred_count << ','
            << in.sla_overrides << ',' << in.remote_assignments << ',' << f(s.reward);
        for (const auto& d : in.dcs) {
            out << ',' << f(d.energy_consumption_kwh) << ',' << f(d.energy_cost_usd) << ','
                << f(d.carbon_emissions_kg) << ',' << f(d.water_l) << ',' << d.sla_met << ',' << d.sla_violated
                << ',' << f(d.cpu_util_pct) << ',' << f(d.gpu_util_pct) << ',' << f(d.mem_util_pct) << ','
                << d.running_count << ',' << d.pending_count << ',' << d.started_count << ',' << d.assigned_count
                << ',' << f(d.it_power_w) << ',' << f(d.hvac_power_w) << ',' << f(d.setpoint_c) << ','
                << f(d.crac_return_temp_c) << ',' << f(d.price_usd_per_mwh) << ',' << f(d.ci_g_per_kwh);
        }
        out << '\n';
    }
    return out.str();
}

KpiRow compute_kpis(const std::vector<StepRecord>& steps) {
    double cost = 0.0;
    double co2 = 0.0;
    double energy = 0.0;
    double water = 0.0;
    double met = 0.0;
    double violated = 0.0;
    double cpu = 0.0;
    double gpu = 0.0;
    double tx = 0.0;
    double deferred = 0.0;
    for (const auto& s : steps) {
        const auto& in = s.info;
        const Means m = util_means(in);
        cost += in.total_energy_cost_usd();
        co2 += total_co2_kg(in);
        energy += total_energy_kwh(in);
        water += in.total_water_l();
        met += in.total_sla_met();
        violated += in.total_sla_violated();
        cpu += m.cpu;
        gpu += m.gpu;
        tx += in.transmission_cost_total_usd;
        deferred += in.tasks_deferred_count;
    }
    const double n = steps.empty() ? 1.0 : static_cast<double>(steps.size());
    const double done = met + violated;
    return KpiRow{cost,
                  co2 / 1000.0,
                  energy / 1000.0,
                  water / 1000.0,
                  done > 0.0 ? violated / done * 100.0 : 0.0,
                  cpu / n,
                  gpu / n,
                  tx,
                  deferred};
}

EpisodeResult run_episode(const config::Configs& configs, const schedenv::ScenarioFactory& factory,
                          std::uint64_t seed) {
    const auto strategy = controllers::parse_strategy(configs.sim.strategy);
    if (configs.sim.single_action_mode) {
        spdlog::warn("single_action_mode is ignored by rule-based strategies");
    }
    schedenv::TaskSchedulingEnv env(factory);
    env.reset(seed);
    controllers::RuleBasedController rbc(strategy);
    const auto hvac = config::make_hvac_policies(configs);

    EpisodeResult out;
    out.seed = seed;
    out.strategy = std::string(controllers::to_string(strategy));
    out.steps.reserve(static_cast<std::size_t>(env.horizon_steps()));
    while (!env.done()) {
        const auto actions = rbc.decide(controllers::make_views(env), env.current_tasks());
        auto r = env.step(actions, controllers::decide_hvac(hvac, env.cluster()));
        out.steps.push_back(StepRecord{std::move(r.info), r.reward});
    }
    out.kpis = compute_kpis(out.steps);
    return out;
}

EpisodeResult run_episode(const config::Configs& configs, std::uint64_t seed) {
    return run_episode(configs, config::make_scenario_factory(configs), seed);
}

std::array<KpiStat, 9> summarize(const std::vector<KpiRow>& rows) {
    if (rows.empty()) throw ConfigError("summary needs at least one run");
    std::array<KpiStat, 9> out{};
    const double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        double sum = 0.0;
        bool constant = true;
        for (const auto& r : rows) {
            sum += r[k];
            constant = constant && r[k] == rows.front()[k];
        }
        // sum / n of equal values can be off by an ulp, which would leave a
        // nonzero spread.
        const double mean = constant ? rows.front()[k] : sum / n;
        double sq = 0.0;
        for (const auto& r : rows) sq += (r[k] - mean) * (r[k] - mean);
        out[k] = KpiStat{mean, std::sqrt(sq / n), rows.size()};
    }
    return out;
}

void write_episode(const std::filesystem::path& out_dir, const EpisodeResult& ep) {
    const std::string k = std::to_string(ep.seed);
    write_file(out_dir / ("steps_seed" + k + ".csv"), format_step_log(ep.steps));
    nlohmann::json j;
    j["seed"] = ep.seed;
    j["strategy"] = ep.strategy;
    j["steps"] = ep.steps.size();
    j["kpis"] = kpi_object(ep.kpis);
    write_file(out_dir / ("kpi_seed" + k + ".json"), j.dump(2) + "\n");
}

void write_summary(const std::filesystem::path& out_dir, const std::string& strategy,
                   const std::vector<std::uint64_t>& seeds, const std::array<KpiStat, 9>& summary) {
    std::ostringstream csv;
    csv << "kpi,mean,std,n\n";
    nlohmann::json kpis = nlohmann::json::object();
    for (std::size_t k = 0; k < summary.size(); ++k) {
        const auto& s = summary[k];
        csv << kKpiNames[k] << ',' << f(s.mean) << ',' << f(s.std) << ',' << s.n << '\n';
        kpis[std::string(kKpiNames[k])] = {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
    }
    write_file(out_dir / "summary.csv", csv.str());
    nlohmann::json j;
    j["strategy"] = strategy;
    j["seeds"] = seeds;
    j["kpis"] = kpis;
    write_file(out_dir / "summary.json", j.dump(2) + "\n");
}

SweepResult run_sweep(const config::Configs& configs, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir) {
    if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    const auto factory = config::make_scenario_factory(configs);
    SweepResult out;
    std::vector<KpiRow> rows;
    for (auto seed : seeds) {
        auto ep = run_episode(configs, factory, seed);
        spdlog::info("seed {}: {} steps, cost {:.2f} USD", seed, ep.steps.size(), ep.kpis[0]);
        if (!out_dir.empty()) write_episode(out_dir, ep);
        rows.push_back(ep.kpis);
        out.episodes.push_back(std::move(ep));
    }
    out.summary = summarize(rows);
    if (!out_dir.empty()) {
        write_summary(out_dir, std::string(controllers::to_string(controllers::parse_strategy(configs.sim.strategy))),
                      seeds, out.summary);
    }
    return out;
}

}  // namespace geodc::runner
