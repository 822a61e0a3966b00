#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "geodc/cluster.hpp"

namespace geodc::rewards {

using cluster::ClusterInfo;
using Args = std::map<std::string, double>;

double energy_price_reward(const ClusterInfo& info, double normalize_factor = 1000.0);
double carbon_emissions_reward(const ClusterInfo& info, double normalize_factor = 100.0);
double energy_consumption_reward(const ClusterInfo& info, double normalize_factor = 1000.0);
double transmission_cost_reward(const ClusterInfo& info, double normalize_factor = 10.0);
double transmission_emissions_reward(const ClusterInfo& info, double normalize_factor = 10.0);
double sla_penalty_reward(const ClusterInfo& info, double penalty_per_violation = 1.0);
/// Completed tasks (met or violated) per kWh, transmission included.
double efficiency_reward(const ClusterInfo& info, double epsilon = 1e-6);

class RewardComponent {
public:
    virtual ~RewardComponent() = default;
    virtual double operator()(const ClusterInfo& info) = 0;
};

using Factory = std::function<std::unique_ptr<RewardComponent>(const Args&)>;

class Registry {
public:
    /// A registry holding the seven built-in components.
    static Registry with_builtins();

    void register_component(const std::string& name, Factory factory);
    [[nodiscard]] const Factory& resolve(const std::string& name) const;
    [[nodiscard]] bool contains(const std::string& name) const { return factories_.contains(name); }
    [[nodiscard]] std::vector<std::string> names() const;

private:
    std::map<std::string, Factory> factories_;
};

/// Process-wide registry used when none is passed explicitly.
Registry& default_registry();

struct ComponentSpec {
    double weight = 1.0;
    Args args;
};

struct RewardConfig {
    std::map<std::string, ComponentSpec> components;
    bool normalize = false;
};

/// Reads `reward.normalize` and `reward.components.<name>.{weight,args}`.
RewardConfig load_reward_config(const std::filesystem::path& path);

/// Default weighting used when no reward file is given.
RewardConfig default_reward_config();

struct RewardBreakdown {
    double total = 0.0;
    std::map<std::string, double> raw;
    std::map<std::string, double> weighted;
};

/// Welford running mean/variance; z-scores use a 1e-8 floor on the std.
class RunningNorm {
public:
    static constexpr double kStdFloor = 1e-8;

    /// Folds `x` into the statistics, then returns its z-score.
    double update(double x);
    [[nodiscard]] double mean() const { return mean_; }
    [[nodiscard]] double stddev() const;
    [[nodiscard]] long count() const { return n_; }

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

class CompositeReward {
public:
    /// Resolves every component now; unknown names throw ConfigError.
    explicit CompositeReward(const RewardConfig& config, const Registry& registry = default_registry());

    RewardBreakdown operator()(const ClusterInfo& info);
    [[nodiscard]] const RewardBreakdown& last() const { return last_; }

private:
    struct Entry {
        std::string name;
        double weight = 0.0;
        std::unique_ptr<RewardComponent> component;
        RunningNorm norm;
    };
    std::vector<Entry> entries_;
    bool normalize_ = false;
    RewardBreakdown last_;
};

}  // namespace geodc::rewards
