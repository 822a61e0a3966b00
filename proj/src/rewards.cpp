#include "geodc/rewards.hpp"

#include <cmath>
#include <set>

#include <yaml-cpp/yaml.h>

#include "geodc/errors.hpp"

namespace geodc::rewards {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be > 0");
}

double total_energy_kwh(const ClusterInfo& info) {
    return info.total_dc_energy_kwh() + info.transmission_energy_total_kwh;
}

}  // namespace

double energy_price_reward(const ClusterInfo& info, double f) {
    require_positive(f, "normalize_factor");
    return -info.total_energy_cost_usd() / f;
}

double carbon_emissions_reward(const ClusterInfo& info, double f) {
    require_positive(f, "normalize_factor");
    return -(info.total_dc_emissions_kg() + info.transmission_emissions_total_kg) / f;
}

double energy_consumption_reward(const ClusterInfo& info, double f) {
    require_positive(f, "normalize_factor");
    return -total_energy_kwh(info) / f;
}

double transmission_cost_reward(const ClusterInfo& info, double f) {
    require_positive(f, "normalize_factor");
    return -info.transmission_cost_total_usd / f;
}

double transmission_emissions_reward(const ClusterInfo& info, double f) {
    require_positive(f, "normalize_factor");
    return -info.transmission_emissions_total_kg / f;
}

double sla_penalty_reward(const ClusterInfo& info, double penalty) {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw ConfigError("penalty_per_violation must be >= 0");
    return -(static_cast<double>(info.total_sla_violated()) * penalty);
}

double efficiency_reward(const ClusterInfo& info, double epsilon) {
    require_positive(epsilon, "epsilon");
    const double completed = static_cast<double>(info.total_sla_met() + info.total_sla_violated());
    return completed / (total_energy_kwh(info) + epsilon);
}

namespace {

using Fn = double (*)(const ClusterInfo&, double);

class BuiltinComponent final : public RewardComponent {
public:
    BuiltinComponent(Fn fn, double param) : fn_(fn), param_(param) {}
    double operator()(const ClusterInfo& info) override { return fn_(info, param_); }

private:
    Fn fn_;
    double param_;
};

Factory builtin(Fn fn, std::string arg_name, double default_value) {
    return [fn, arg_name = std::move(arg_name), default_value](const Args& args) -> std::unique_ptr<RewardComponent> {
        double param = default_value;
        for (const auto& [key, value] : args) {
            if (key != arg_name) throw ConfigError("unknown reward argument '" + key + "'");
            param = value;
        }
        // Validate eagerly so bad arguments fail at construction.
        fn(ClusterInfo{}, param);
        return std::make_unique<BuiltinComponent>(fn, param);
    };
}

}  // namespace

Registry Registry::with_builtins() {
    Registry r;
    r.register_component("energy_price", builtin(&energy_price_reward, "normalize_factor", 1000.0));
    r.register_component("carbon_emissions", builtin(&carbon_emissions_reward, "normalize_factor", 100.0));
    r.register_component("energy_consumption", builtin(&energy_consumption_reward, "normalize_factor", 1000.0));
    r.register_component("transmission_cost", builtin(&transmission_cost_reward, "normalize_factor", 10.0));
    r.register_component("transmission_emissions", builtin(&transmission_emissions_reward, "normalize_factor", 10.0));
    r.register_component("sla_penalty", builtin(&sla_penalty_reward, "penalty_per_violation", 1.0));
    r.register_component("efficiency", builtin(&efficiency_reward, "epsilon", 1e-6));
    return r;
}

void Registry::register_component(const std::string& name, Factory factory) {
    if (name.empty()) throw ConfigError("reward component name must not be empty");
    if (!factory) throw ConfigError("reward component '" + name + "' has no factory");
    if (!factories_.emplace(name, std::move(factory)).second) {
        throw ConfigError("reward component '" + name + "' is already registered");
    }
}

const Factory& Registry::resolve(const std::string& name) const {
    const auto it = factories_.find(name);
    if (it == factories_.end()) throw ConfigError("unknown reward component '" + name + "'");
    return it->second;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) out.push_back(name);
    return out;
}

Registry& default_registry() {
    static Registry registry = Registry::with_builtins();
    return registry;
}

RewardConfig default_reward_config() {
    RewardConfig c;
    c.components["energy_price"] = {0.4, {}};
    c.components["carbon_emissions"] = {0.3, {}};
    c.components["sla_penalty"] = {0.2, {}};
    c.components["transmission_cost"] = {0.1, {}};
    return c;
}

RewardConfig load_reward_config(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError("reward config '" + path.string() + "': " + e.what());
    }
    const YAML::Node reward = root["reward"];
    if (!reward || !reward.IsMap()) throw ConfigError("reward config needs a 'reward' mapping");
    RewardConfig config;
    try {
        if (reward["normalize"]) config.normalize = reward["normalize"].as<bool>();
        const YAML::Node comps = reward["components"];
        if (!comps || !comps.IsMap() || comps.size() == 0) {
            throw ConfigError("reward config needs at least one component");
        }
        for (const auto& item : comps) {
            const auto name = item.first.as<std::string>();
            ComponentSpec spec;
            const YAML::Node body = item.second;
            if (body["weight"]) spec.weight = body["weight"].as<double>();
            if (!std::isfinite(spec.weight)) throw ConfigError("weight of '" + name + "' must be finite");
            if (const YAML::Node args = body["args"]) {
                if (!args.IsMap()) throw ConfigError("args of '" + name + "' must be a mapping");
                for (const auto& a : args) spec.args[a.first.as<std::string>()] = a.second.as<double>();
            }
            config.components[name] = std::move(spec);
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError("reward config '" + path.string() + "': " + e.what());
    }
    return config;
}

double RunningNorm::update(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    return (x - mean_) / std::max(stddev(), kStdFloor);
}

double RunningNorm::stddev() const { return n_ > 0 ? std::sqrt(std::max(m2_, 0.0) / static_cast<double>(n_)) : 0.0; }

CompositeReward::CompositeReward(const RewardConfig& config, const Registry& registry) : normalize_(config.normalize) {
    if (config.components.empty()) throw ConfigError("composite reward needs at least one component");
    for (const auto& [name, spec] : config.components) {
        if (!std::isfinite(spec.weight)) throw ConfigError("weight of '" + name + "' must be finite");
        entries_.push_back(Entry{name, spec.weight, registry.resolve(name)(spec.args), {}});
    }
}

RewardBreakdown CompositeReward::operator()(const ClusterInfo& info) {
    RewardBreakdown out;
    for (auto& e : entries_) {
        const double raw = (*e.component)(info);
        const double value = normalize_ ? e.norm.update(raw) : raw;
        const double weighted = e.weight * value;
        out.raw[e.name] = raw;
        out.weighted[e.name] = weighted;
        out.total += weighted;
    }
    last_ = out;
    return out;
}

}  // namespace geodc::rewards
