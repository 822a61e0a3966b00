#include "geodc/config.hpp"

#include <set>

#include <yaml-cpp/yaml.h>

#include "geodc/envdata.hpp"
#include "geodc/errors.hpp"
#include "geodc/rng.hpp"

namespace geodc::config {

namespace fs = std::filesystem;

namespace {

YAML::Node load_yaml(const fs::path& path) {
    try {
        return YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw ConfigError("cannot open '" + path.string() + "'");
    } catch (const YAML::Exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    const YAML::Node v = node[key];
    if (!v || v.IsNull()) return;
    try {
        out = v.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type");
    }
}

void read_path(const YAML::Node& node, const char* key, std::optional<fs::path>& out, const fs::path& base,
               const std::string& where) {
    std::string s;
    read(node, key, s, where);
    if (!s.empty()) out = base / s;
}

void read_range(const YAML::Node& node, const char* key, workload::Range& out, const std::string& where) {
    const YAML::Node v = node[key];
    if (!v || v.IsNull()) return;
    if (!v.IsSequence() || v.size() != 2) throw ConfigError(where + ": '" + key + "' must be [lo, hi]");
    try {
        out = workload::Range{v[0].as<double>(), v[1].as<double>()};
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": '" + key + "' must hold numbers");
    }
}

SyntheticProfile read_profile(const YAML::Node& node, SyntheticProfile fallback, const std::string& where) {
    if (!node) return fallback;
    if (!node.IsMap()) throw ConfigError(where + ": synthetic profile must be a mapping");
    read(node, "base", fallback.base, where);
    read(node, "amplitude", fallback.amplitude, where);
    read(node, "noise_sd", fallback.noise_sd, where);
    return fallback;
}

void read_series(const YAML::Node& node, SeriesSource& out, const fs::path& base, const std::string& where) {
    if (!node) return;
    if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
    read_path(node, "file", out.file, base, where);
    out.synthetic = read_profile(node["synthetic"], out.synthetic, where);
}

}  // namespace

Instant SimConfig::start() const {
    return make_instant(year, static_cast<unsigned>(month), static_cast<unsigned>(init_day), init_hour, 0);
}

TimeWindow SimConfig::window() const {
    const Instant s = start();
    return TimeWindow{s, s + std::chrono::days{duration_days}};
}

void validate(const SimConfig& sim) {
    if (sim.timestep_minutes != 15) throw ConfigError("timestep_minutes must be 15");
    if (sim.duration_days < 1) throw ConfigError("duration_days must be >= 1");
    if (sim.month < 1 || sim.month > 12) throw ConfigError("month must be in 1..12");
    if (sim.init_day < 1 || sim.init_day > 31) throw ConfigError("init_day must be in 1..31");
    if (sim.init_hour < 0 || sim.init_hour > 23) throw ConfigError("init_hour must be in 0..23");
    const std::chrono::year_month_day ymd{std::chrono::year{sim.year}, std::chrono::month{static_cast<unsigned>(sim.month)},
                                          std::chrono::day{static_cast<unsigned>(sim.init_day)}};
    if (!ymd.ok()) throw ConfigError("start date is not a calendar date");
    if (sim.synthetic_workload.mean_tasks_per_interval < 0.0) {
        throw ConfigError("mean_tasks_per_interval must be >= 0");
    }
    if (sim.strategy != "manual_rl") controllers::parse_strategy(sim.strategy);
    if (sim.disable_defer_action && !sim.single_action_mode) {
        throw ConfigError("disable_defer_action only applies in single_action_mode");
    }
}

SimConfig load_sim_config(const fs::path& path) {
    const YAML::Node root = load_yaml(path);
    const YAML::Node s = root["simulation"];
    if (!s || !s.IsMap()) throw ConfigError("'" + path.string() + "' needs a 'simulation' mapping");
    const fs::path base = path.parent_path();
    const std::string where = path.filename().string();
    SimConfig c;
    read(s, "year", c.year, where);
    read(s, "month", c.month, where);
    read(s, "init_day", c.init_day, where);
    read(s, "init_hour", c.init_hour, where);
    read(s, "duration_days", c.duration_days, where);
    read(s, "timestep_minutes", c.timestep_minutes, where);
    read_path(s, "workload_path", c.workload_path, base, where);
    if (const YAML::Node w = s["synthetic_workload"]) {
        if (!w.IsMap()) throw ConfigError(where + ": synthetic_workload must be a mapping");
        auto& sw = c.synthetic_workload;
        read(w, "mean_tasks_per_interval", sw.mean_tasks_per_interval, where);
        read_range(w, "duration_min", sw.ranges.duration_min, where);
        read_range(w, "cores", sw.ranges.cores, where);
        read_range(w, "gpu", sw.ranges.gpu, where);
        read_range(w, "mem_gb", sw.ranges.mem_gb, where);
        read_range(w, "bandwidth_gb", sw.ranges.bandwidth_gb, where);
        read_range(w, "sla_multiplier", sw.ranges.sla_multiplier, where);
    }
    read(s, "cloud_provider", c.cloud_provider, where);
    std::string network_dir = "network";
    read(s, "network_dir", network_dir, where);
    c.network_dir = base / network_dir;
    read_path(s, "cost_matrix_path", c.cost_matrix_path, base, where);
    read_path(s, "region_map_path", c.region_map_path, base, where);
    read_path(s, "delay_params_path", c.delay_params_path, base, where);
    read(s, "intra_throughput_mbps", c.intra_throughput_mbps, where);
    read(s, "intra_rtt_ms", c.intra_rtt_ms, where);
    read(s, "shuffle_datacenters", c.shuffle_datacenters, where);
    read(s, "strategy", c.strategy, where);
    read(s, "single_action_mode", c.single_action_mode, where);
    read(s, "disable_defer_action", c.disable_defer_action, where);
    validate(c);
    return c;
}

std::vector<DatacenterSpec> load_datacenters(const fs::path& path) {
    const YAML::Node root = load_yaml(path);
    const YAML::Node list = root["datacenters"];
    if (!list || !list.IsSequence() || list.size() == 0) {
        throw ConfigError("'" + path.string() + "' needs a non-empty 'datacenters' list");
    }
    const fs::path base = path.parent_path();
    std::vector<DatacenterSpec> out;
    std::set<int> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const YAML::Node n = list[i];
        const std::string where = path.filename().string() + " entry " + std::to_string(i + 1);
        if (!n.IsMap()) throw ConfigError(where + " must be a mapping");
        DatacenterSpec d;
        read(n, "dc_id", d.dc_id, where);
        read(n, "location", d.location, where);
        read(n, "timezone_shift", d.timezone_shift_h, where);
        read(n, "population_weight", d.population_weight, where);
        read(n, "total_cores", d.total_cores, where);
        read(n, "total_gpus", d.total_gpus, where);
        read(n, "total_mem", d.total_mem_gb, where);
        std::string dc_config = "dc_config.json";
        read(n, "dc_config_file", dc_config, where);
        d.dc_config_file = base / dc_config;
        read(n, "hru_enabled", d.hru_enabled, where);
        if (const YAML::Node h = n["hvac"]) {
            std::string mode = "fixed";
            read(h, "controller", mode, where);
            if (mode == "fixed") {
                d.hvac.mode = HvacMode::Fixed;
            } else if (mode == "deadband") {
                d.hvac.mode = HvacMode::Deadband;
            } else {
                throw ConfigError(where + ": unknown hvac controller '" + mode + "'");
            }
            read(h, "setpoint", d.hvac.setpoint_c, where);
            read(h, "lo", d.hvac.deadband_lo, where);
            read(h, "hi", d.hvac.deadband_hi, where);
        }
        if (const YAML::Node data = n["data"]) {
            read_series(data["price"], d.price, base, where + " price");
            read_series(data["carbon"], d.carbon, base, where + " carbon");
            if (const YAML::Node w = data["weather"]) {
                read_path(w, "file", d.weather.file, base, where);
                d.weather.drybulb = read_profile(w["synthetic"]["drybulb"], d.weather.drybulb, where);
                d.weather.humidity = read_profile(w["synthetic"]["humidity"], d.weather.humidity, where);
            }
        }
        if (d.dc_id < 1) throw ConfigError(where + ": dc_id must be >= 1");
        if (!ids.insert(d.dc_id).second) throw ConfigError(where + ": duplicate dc_id");
        if (d.location.empty()) throw ConfigError(where + ": location is required");
        if (!(d.population_weight > 0.0)) throw ConfigError(where + ": population_weight must be > 0");
        if (d.total_cores < 0.0 || d.total_gpus < 0.0 || d.total_mem_gb < 0.0) {
            throw ConfigError(where + ": capacities must be >= 0");
        }
        out.push_back(std::move(d));
    }
    return out;
}

Configs load_configs(const fs::path& sim_path, const fs::path& dc_path, const fs::path& reward_path) {
    Configs c;
    c.sim = load_sim_config(sim_path);
    c.datacenters = load_datacenters(dc_path);
    if (!reward_path.empty()) c.reward = rewards::load_reward_config(reward_path);
    // Fail on unknown reward names now rather than at reset.
    rewards::CompositeReward probe(c.reward);
    (void)probe;
    return c;
}

network::Network load_network(const SimConfig& sim) {
    const fs::path costs =
        sim.cost_matrix_path.value_or(sim.network_dir / (sim.cloud_provider + "_transmission_cost_matrix.csv"));
    const fs::path regions = sim.region_map_path.value_or(sim.network_dir / (sim.cloud_provider + "_region_map.csv"));
    const fs::path delays = sim.delay_params_path.value_or(sim.network_dir / "delay_params.csv");
    const network::LinkParams intra{sim.intra_throughput_mbps, sim.intra_rtt_ms};
    return network::Network{network::load_cost_matrix(costs), network::load_delay_table(delays, intra),
                            network::load_region_map(regions)};
}

namespace {

using envdata::SeriesKind;
using envdata::TimeSeries;
using SeriesPtr = std::shared_ptr<const TimeSeries>;

/// File-backed inputs, read once per factory.
struct FileSeries {
    SeriesPtr price;
    SeriesPtr carbon;
    SeriesPtr drybulb;
    SeriesPtr relhumidity;
};

SeriesPtr synth(SeriesKind kind, const SyntheticProfile& p, const TimeWindow& w, std::uint64_t seed,
                const std::string& location) {
    try {
        return std::make_shared<const TimeSeries>(
            envdata::synth_series(kind, p.base, p.amplitude, p.noise_sd, w, seed, location));
    } catch (const DomainError& e) {
        throw ConfigError("synthetic " + std::string(envdata::to_string(kind)) + " for " + location + ": " + e.what());
    }
}

}  // namespace

schedenv::ScenarioFactory make_scenario_factory(const Configs& configs) {
    const SimConfig sim = configs.sim;
    const auto specs = configs.datacenters;
    const auto reward = configs.reward;
    auto net = std::make_shared<const network::Network>(load_network(sim));

    std::vector<physics::DcPhysicsParams> params;
    std::vector<FileSeries> files;
    for (const auto& d : specs) {
        params.push_back(physics::load_dc_config(d.dc_config_file));
        FileSeries f;
        if (d.price.file) f.price = std::make_shared<const TimeSeries>(envdata::load_price_csv(*d.price.file, d.location));
        if (d.carbon.file) {
            f.carbon = std::make_shared<const TimeSeries>(envdata::load_carbon_csv(*d.carbon.file, d.location));
        }
        if (d.weather.file) {
            auto w = envdata::load_weather_json(*d.weather.file, d.location);
            f.drybulb = std::make_shared<const TimeSeries>(std::move(w.drybulb));
            f.relhumidity = std::make_shared<const TimeSeries>(std::move(w.relhumidity));
        }
        files.push_back(std::move(f));
    }
    std::optional<workload::Trace> trace;
    if (sim.workload_path) trace = workload::load_trace(*sim.workload_path);

    return [sim, specs, reward, net, params, files, trace](std::uint64_t seed) {
        const Rng root(seed);
        const TimeWindow window = sim.window();
        std::vector<cluster::DatacenterNode> nodes;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& d = specs[i];
            const auto stream = [&](std::uint64_t k) {
                return root.derive(kSeriesStreamBase + 8 * static_cast<std::uint64_t>(i) + k).seed();
            };
            cluster::SiteSeries series;
            series.price = files[i].price ? files[i].price
                                          : synth(SeriesKind::Price, d.price.synthetic, window, stream(0), d.location);
            series.carbon = files[i].carbon
                                ? files[i].carbon
                                : synth(SeriesKind::CarbonIntensity, d.carbon.synthetic, window, stream(1), d.location);
            series.drybulb = files[i].drybulb ? files[i].drybulb
                                              : synth(SeriesKind::DryBulbTempC, d.weather.drybulb, window, stream(2),
                                                      d.location);
            series.relhumidity = files[i].relhumidity ? files[i].relhumidity
                                                      : synth(SeriesKind::RelHumidityPct, d.weather.humidity, window,
                                                              stream(3), d.location);
            cluster::DatacenterNode node(d.dc_id, d.location, d.total_cores, d.total_gpus, d.total_mem_gb, params[i],
                                         std::move(series));
            node.timezone_shift_h = d.timezone_shift_h;
            node.population_weight = d.population_weight;
            node.hru_enabled = d.hru_enabled;
            const auto& range = node.physics.setpoint_range;
            if (!(d.hvac.setpoint_c >= range[0] && d.hvac.setpoint_c <= range[1])) {
                throw ConfigError("dc " + std::to_string(d.dc_id) + ": initial setpoint outside the allowed range");
            }
            node.state.setpoint_c = d.hvac.setpoint_c;
            nodes.push_back(std::move(node));
        }

        schedenv::Scenario sc;
        sc.cluster = std::make_unique<cluster::Cluster>(std::move(nodes), net, sim.start());
        sc.trace = trace ? *trace
                         : workload::generate_synthetic_trace(window, sim.synthetic_workload.mean_tasks_per_interval,
                                                              sim.synthetic_workload.ranges,
                                                              root.derive(kWorkloadStream).seed());
        sc.reward = reward;
        sc.options = schedenv::EnvOptions{sim.duration_days, sim.single_action_mode, sim.disable_defer_action,
                                          sim.shuffle_datacenters};
        return sc;
    };
}

std::vector<std::unique_ptr<controllers::HvacPolicy>> make_hvac_policies(const Configs& configs) {
    std::vector<std::unique_ptr<controllers::HvacPolicy>> out;
    for (const auto& d : configs.datacenters) {
        if (d.hvac.mode == HvacMode::Fixed) {
            out.push_back(std::make_unique<controllers::FixedHvac>(d.hvac.setpoint_c));
        } else {
            out.push_back(std::make_unique<controllers::DeadbandHvac>(d.hvac.deadband_lo, d.hvac.deadband_hi));
        }
    }
    return out;
}

}  // namespace geodc::config
