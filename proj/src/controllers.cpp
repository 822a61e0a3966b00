#include "geodc/controllers.hpp"

#include <algorithm>

#include "geodc/errors.hpp"

namespace geodc::controllers {

using cluster::Demand;

Strategy parse_strategy(std::string_view name) {
    if (name == "local_only") return Strategy::LocalOnly;
    if (name == "lowest_carbon") return Strategy::LowestCarbon;
    if (name == "lowest_price") return Strategy::LowestPrice;
    if (name == "most_available") return Strategy::MostAvailable;
    if (name == "round_robin") return Strategy::RoundRobin;
    throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::LocalOnly: return "local_only";
        case Strategy::LowestCarbon: return "lowest_carbon";
        case Strategy::LowestPrice: return "lowest_price";
        case Strategy::MostAvailable: return "most_available";
        case Strategy::RoundRobin: return "round_robin";
    }
    return "?";
}

std::vector<DcView> make_views(const schedenv::TaskSchedulingEnv& env) {
    std::vector<DcView> views;
    const Instant now = env.now();
    for (int id : env.dc_order()) {
        const auto& dc = env.cluster().node(id);
        views.push_back(DcView{id, env.action_for(id), dc.carbon_at(now), dc.price_at(now), dc.available(), dc.total()});
    }
    return views;
}

namespace {

bool fits(const Demand& free, const Demand& d) {
    return d.cores <= free.cores && d.gpus <= free.gpus && d.mem <= free.mem;
}

double core_fraction(const Demand& free, const Demand& total) {
    return total.cores > 0 ? static_cast<double>(free.cores) / static_cast<double>(total.cores) : 0.0;
}

}  // namespace

schedenv::ActionList RuleBasedController::decide(const std::vector<DcView>& dcs,
                                                 const std::vector<workload::Task>& tasks) {
    schedenv::ActionList actions;
    if (tasks.empty()) return actions;
    if (dcs.empty()) throw ConfigError("controller needs at least one datacenter");

    // Ties go to the lowest dc_id, whatever the observation order.
    std::vector<std::size_t> by_id(dcs.size());
    for (std::size_t i = 0; i < dcs.size(); ++i) by_id[i] = i;
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return dcs[a].dc_id < dcs[b].dc_id; });

    std::vector<Demand> free;
    for (const auto& v : dcs) free.push_back(v.available);
    auto index_of = [&](int dc_id) -> std::size_t {
        for (std::size_t i = 0; i < dcs.size(); ++i) {
            if (dcs[i].dc_id == dc_id) return i;
        }
        throw ProtocolError("task origin " + std::to_string(dc_id) + " is not a known datacenter");
    };

    actions.reserve(tasks.size());
    for (const auto& task : tasks) {
        const Demand d = Demand::of(task);
        std::size_t pick = index_of(task.origin_dc_id);
        switch (strategy_) {
            case Strategy::LocalOnly: break;
            case Strategy::LowestCarbon:
            case Strategy::LowestPrice: {
                const bool carbon = strategy_ == Strategy::LowestCarbon;
                bool found = false;
                double best = 0.0;
                for (std::size_t i : by_id) {
                    if (!fits(free[i], d)) continue;
                    const double v = carbon ? dcs[i].ci_g_per_kwh : dcs[i].price_usd_per_mwh;
                    if (!found || v < best) {
                        best = v;
                        pick = i;
                        found = true;
                    }
                }
                break;
            }
            case Strategy::MostAvailable: {
                double best = -1.0;
                for (std::size_t i : by_id) {
                    const double v = core_fraction(free[i], dcs[i].total);
                    if (v > best) {
                        best = v;
                        pick = i;
                    }
                }
                break;
            }
            case Strategy::RoundRobin:
                pick = by_id[cursor_];
                cursor_ = (cursor_ + 1) % dcs.size();
                break;
        }
        if (fits(free[pick], d)) {
            free[pick].cores -= d.cores;
            free[pick].gpus -= d.gpus;
            free[pick].mem -= d.mem;
        }
        actions.push_back(dcs[pick].action);
    }
    return actions;
}

FixedHvac::FixedHvac(double setpoint_c, const physics::DcPhysicsParams& params) : setpoint_(setpoint_c) {
    if (!(setpoint_c >= params.setpoint_range[0] && setpoint_c <= params.setpoint_range[1])) {
        throw ConfigError("fixed HVAC setpoint " + std::to_string(setpoint_c) + " outside the allowed range");
    }
}

physics::HvacAction hvac_deadband(double t_return, double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("deadband needs lo < hi");
    if (t_return > hi) return physics::HvacAction::Down1C;
    if (t_return < lo) return physics::HvacAction::Up1C;
    return physics::HvacAction::Hold;
}

DeadbandHvac::DeadbandHvac(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw ConfigError("deadband needs lo < hi");
}

physics::HvacAction DeadbandHvac::decide(const cluster::DatacenterNode& dc) {
    if (!dc.last_result) return physics::HvacAction::Hold;
    return hvac_deadband(dc.last_result->crac_return_temp_c, lo_, hi_);
}

schedenv::HvacActions decide_hvac(const std::vector<std::unique_ptr<HvacPolicy>>& policies,
                                  const cluster::Cluster& cluster) {
    schedenv::HvacActions out;
    if (policies.empty()) return out;
    if (policies.size() != cluster.size()) throw ConfigError("need one HVAC policy per datacenter");
    for (std::size_t i = 0; i < policies.size(); ++i) out.push_back(policies[i]->decide(cluster.nodes()[i]));
    return out;
}

}  // namespace geodc::controllers
