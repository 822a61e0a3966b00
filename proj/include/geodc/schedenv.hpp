#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "geodc/cluster.hpp"
#include "geodc/rewards.hpp"
#include "geodc/rng.hpp"
#include "geodc/workload.hpp"

namespace geodc::schedenv {

using Features = std::vector<double>;
/// One vector per pending task.
using Observation = std::vector<Features>;
using ActionList = std::vector<int>;
using HvacActions = std::vector<std::optional<physics::HvacAction>>;

inline constexpr std::size_t kTimeFeatures = 4;
inline constexpr std::size_t kTaskFeatures = 5;
inline constexpr std::size_t kDcFeatures = 5;

inline constexpr std::size_t per_task_dim(std::size_t n_dcs) { return kTimeFeatures + kTaskFeatures + kDcFeatures * n_dcs; }
inline constexpr std::size_t aggregated_dim(std::size_t n_dcs) { return per_task_dim(n_dcs); }

/// Substream ids derived from the episode seed.
inline constexpr std::uint64_t kOriginStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;

struct EnvOptions {
    int duration_days = 1;
    bool single_action_mode = false;
    bool disable_defer_action = false;
    bool shuffle_datacenters = false;
};

/// Everything an episode starts from. Built fresh by the factory on reset.
struct Scenario {
    std::unique_ptr<cluster::Cluster> cluster;
    workload::Trace trace;
    rewards::RewardConfig reward = rewards::default_reward_config();
    EnvOptions options;
};

using ScenarioFactory = std::function<Scenario(std::uint64_t seed)>;

/// sin/cos of day of year (over 365) and of fractional hour (over 24).
std::array<double, 4> time_features(Instant now);

/// Per-DC block: available core/GPU/memory fractions, CI/1000, price/100.
/// `dc_order` lists dc ids in observation order.
Features dc_features(const cluster::Cluster& cluster, const std::vector<int>& dc_order, Instant now);

Observation build_observation(const cluster::Cluster& cluster, const std::vector<int>& dc_order,
                              const std::vector<workload::Task>& tasks, Instant now);

/// Fixed-size summary: time features, (count, mean cores, mean gpu, mean
/// duration, min minutes-to-deadline), DC block. With no tasks the means
/// are 0 and the minimum is `empty_deadline_sentinel`.
Features aggregate_observation(const cluster::Cluster& cluster, const std::vector<int>& dc_order,
                               const std::vector<workload::Task>& tasks, Instant now, double empty_deadline_sentinel);

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    cluster::ClusterInfo info;
    rewards::RewardBreakdown breakdown;
};

struct AggStepResult {
    Features observation;
    double reward = 0.0;
    bool done = false;
    cluster::ClusterInfo info;
    rewards::RewardBreakdown breakdown;
};

class TaskSchedulingEnv {
public:
    explicit TaskSchedulingEnv(ScenarioFactory factory);

    Observation reset(std::uint64_t seed);

    /// `actions[i]` decides `current_tasks()[i]`: 0 defers, j assigns to the
    /// j-th datacenter in observation order.
    StepResult step(const ActionList& actions, const HvacActions& hvac = {});

    /// One action applied to every pending task. With defer disabled the
    /// action range is 0..N-1, mapped to datacenters 1..N.
    AggStepResult step_single_action(int action, const HvacActions& hvac = {});

    [[nodiscard]] Observation observation() const;
    [[nodiscard]] Features aggregated_observation() const;

    [[nodiscard]] const std::vector<workload::Task>& current_tasks() const { return current_; }
    [[nodiscard]] const cluster::Cluster& cluster() const { return *scenario_.cluster; }
    [[nodiscard]] const std::vector<int>& dc_order() const { return dc_order_; }
    [[nodiscard]] std::size_t num_dcs() const { return dc_order_.size(); }
    /// Action value that sends a task to `dc_id`.
    [[nodiscard]] int action_for(int dc_id) const;
    [[nodiscard]] const EnvOptions& options() const { return scenario_.options; }
    [[nodiscard]] std::int64_t step_index() const { return step_; }
    [[nodiscard]] std::int64_t horizon_steps() const { return horizon_; }
    [[nodiscard]] Instant now() const;
    [[nodiscard]] bool done() const { return step_ >= horizon_; }
    [[nodiscard]] std::size_t injected() const { return injected_; }
    [[nodiscard]] double empty_deadline_sentinel() const;

private:
    void require_active() const;
    void load_arrivals();

    ScenarioFactory factory_;
    Scenario scenario_;
    std::optional<rewards::CompositeReward> reward_;
    std::map<Instant, std::vector<workload::Task>> arrivals_;
    std::vector<workload::Task> current_;
    std::vector<int> dc_order_;
    std::vector<workload::OriginSite> sites_;
    Rng origin_rng_;
    std::int64_t step_ = 0;
    std::int64_t horizon_ = 0;
    std::size_t injected_ = 0;
    bool ready_ = false;
};

}  // namespace geodc::schedenv
