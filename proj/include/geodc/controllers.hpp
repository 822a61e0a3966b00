#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "geodc/cluster.hpp"
#include "geodc/physics.hpp"
#include "geodc/schedenv.hpp"

namespace geodc::controllers {

enum class Strategy { LocalOnly, LowestCarbon, LowestPrice, MostAvailable, RoundRobin };

/// Accepts local_only, lowest_carbon, lowest_price, most_available, round_robin.
Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy s);

/// What a rule-based controller sees of one datacenter.
struct DcView {
    int dc_id = 0;
    int action = 0;
    double ci_g_per_kwh = 0.0;
    double price_usd_per_mwh = 0.0;
    cluster::Demand available;
    cluster::Demand total;
};

/// Views in the environment's observation order.
std::vector<DcView> make_views(const schedenv::TaskSchedulingEnv& env);

class RuleBasedController {
public:
    explicit RuleBasedController(Strategy strategy) : strategy_(strategy) {}

    /// One assignment per task, never a deferral. Feasibility is judged
    /// against availability net of assignments already made in this call.
    schedenv::ActionList decide(const std::vector<DcView>& dcs, const std::vector<workload::Task>& tasks);

    [[nodiscard]] Strategy strategy() const { return strategy_; }
    [[nodiscard]] std::size_t cursor() const { return cursor_; }

private:
    Strategy strategy_;
    std::size_t cursor_ = 0;
};

class HvacPolicy {
public:
    virtual ~HvacPolicy() = default;
    virtual physics::HvacAction decide(const cluster::DatacenterNode& dc) = 0;
};

/// Holds the initial setpoint; the setpoint must lie in [18, 27].
class FixedHvac final : public HvacPolicy {
public:
    explicit FixedHvac(double setpoint_c, const physics::DcPhysicsParams& params = {});
    physics::HvacAction decide(const cluster::DatacenterNode&) override { return physics::HvacAction::Hold; }
    [[nodiscard]] double setpoint() const { return setpoint_; }

private:
    double setpoint_;
};

/// Down1C above `hi`, Up1C below `lo`, otherwise Hold.
physics::HvacAction hvac_deadband(double t_return, double lo = 24.0, double hi = 26.0);

/// Deadband on the CRAC return temperature of the previous step.
class DeadbandHvac final : public HvacPolicy {
public:
    DeadbandHvac(double lo = 24.0, double hi = 26.0);
    physics::HvacAction decide(const cluster::DatacenterNode& dc) override;

private:
    double lo_;
    double hi_;
};

/// One policy per datacenter, in node order.
schedenv::HvacActions decide_hvac(const std::vector<std::unique_ptr<HvacPolicy>>& policies,
                                  const cluster::Cluster& cluster);

}  // namespace geodc::controllers
