#include "geodc/schedenv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "geodc/errors.hpp"

namespace geodc::schedenv {

using workload::Task;
using workload::TaskStatus;

std::array<double, 4> time_features(Instant now) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double day = static_cast<double>(day_of_year(now)) / 365.0;
    const double hour = (static_cast<double>(hour_of_day(now)) + static_cast<double>(minute_of_hour(now)) / 60.0) / 24.0;
    return {std::sin(two_pi * day), std::cos(two_pi * day), std::sin(two_pi * hour), std::cos(two_pi * hour)};
}

namespace {

double fraction(cluster::Units available, cluster::Units total) {
    return total > 0 ? static_cast<double>(available) / static_cast<double>(total) : 0.0;
}

double minutes_to_deadline(const Task& t, Instant now) { return std::max(0.0, minutes_between(now, t.sla_deadline)); }

}  // namespace

Features dc_features(const cluster::Cluster& cluster, const std::vector<int>& dc_order, Instant now) {
    Features f;
    f.reserve(kDcFeatures * dc_order.size());
    for (int id : dc_order) {
        const auto& dc = cluster.node(id);
        f.push_back(fraction(dc.available().cores, dc.total().cores));
        f.push_back(fraction(dc.available().gpus, dc.total().gpus));
        f.push_back(fraction(dc.available().mem, dc.total().mem));
        f.push_back(dc.carbon_at(now) / 1000.0);
        f.push_back(dc.price_at(now) / 100.0);
    }
    return f;
}

Observation build_observation(const cluster::Cluster& cluster, const std::vector<int>& dc_order,
                              const std::vector<Task>& tasks, Instant now) {
    Observation obs;
    if (tasks.empty()) return obs;
    const auto time = time_features(now);
    const Features dcs = dc_features(cluster, dc_order, now);
    obs.reserve(tasks.size());
    for (const auto& t : tasks) {
        Features v(time.begin(), time.end());
        v.reserve(per_task_dim(dc_order.size()));
        v.push_back(static_cast<double>(t.origin_dc_id));
        v.push_back(t.cores_req);
        v.push_back(t.gpu_req);
        v.push_back(t.duration_min);
        v.push_back(minutes_to_deadline(t, now));
        v.insert(v.end(), dcs.begin(), dcs.end());
        obs.push_back(std::move(v));
    }
    return obs;
}

Features aggregate_observation(const cluster::Cluster& cluster, const std::vector<int>& dc_order,
                               const std::vector<Task>& tasks, Instant now, double sentinel) {
    const auto time = time_features(now);
    Features v(time.begin(), time.end());
    double cores = 0.0;
    double gpu = 0.0;
    double duration = 0.0;
    double min_deadline = sentinel;
    for (const auto& t : tasks) {
        cores += t.cores_req;
        gpu += t.gpu_req;
        duration += t.duration_min;
        min_deadline = std::min(min_deadline, minutes_to_deadline(t, now));
    }
    const double n = static_cast<double>(tasks.size());
    v.push_back(n);
    v.push_back(tasks.empty() ? 0.0 : cores / n);
    v.push_back(tasks.empty() ? 0.0 : gpu / n);
    v.push_back(tasks.empty() ? 0.0 : duration / n);
    v.push_back(tasks.empty() ? sentinel : min_deadline);
    const Features dcs = dc_features(cluster, dc_order, now);
    v.insert(v.end(), dcs.begin(), dcs.end());
    return v;
}

TaskSchedulingEnv::TaskSchedulingEnv(ScenarioFactory factory) : factory_(std::move(factory)) {
    if (!factory_) throw ConfigError("environment needs a scenario factory");
}

Observation TaskSchedulingEnv::reset(std::uint64_t seed) {
    scenario_ = factory_(seed);
    if (!scenario_.cluster) throw ConfigError("scenario factory returned no cluster");
    const EnvOptions& opt = scenario_.options;
    if (opt.duration_days < 1) throw ConfigError("duration_days must be >= 1");
    horizon_ = static_cast<std::int64_t>(opt.duration_days) * kStepsPerDay;

    const auto& cl = *scenario_.cluster;
    const TimeWindow window{cl.start(), cl.time_of(horizon_)};
    std::vector<std::string> missing;
    for (const auto& dc : cl.nodes()) {
        const auto check = [&](const std::shared_ptr<const envdata::TimeSeries>& s, const char* what) {
            if (!s || !s->covers(window)) {
                missing.push_back("dc " + std::to_string(dc.dc_id) + " (" + dc.location_code + ") " + what);
            }
        };
        check(dc.series.price, "price");
        check(dc.series.carbon, "carbon intensity");
        check(dc.series.drybulb, "dry-bulb temperature");
        check(dc.series.relhumidity, "relative humidity");
    }
    if (!missing.empty()) {
        std::string msg = "exogenous data does not cover the simulation window:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw ConfigError(msg);
    }

    reward_.emplace(scenario_.reward);

    const Rng root(seed);
    origin_rng_ = root.derive(kOriginStream);
    dc_order_.clear();
    sites_.clear();
    for (const auto& dc : cl.nodes()) {
        dc_order_.push_back(dc.dc_id);
        sites_.push_back(workload::OriginSite{dc.dc_id, dc.timezone_shift_h, dc.population_weight});
    }
    if (opt.shuffle_datacenters) {
        Rng shuffle = root.derive(kShuffleStream);
        for (std::size_t i = dc_order_.size(); i > 1; --i) {
            std::swap(dc_order_[i - 1], dc_order_[shuffle.uniform_index(i)]);
        }
    }

    arrivals_.clear();
    for (auto& interval : scenario_.trace) {
        if (!window.contains(interval.interval_start)) continue;
        auto& slot = arrivals_[interval.interval_start];
        for (auto& t : interval.tasks) slot.push_back(std::move(t));
    }
    scenario_.trace.clear();

    step_ = 0;
    injected_ = 0;
    current_.clear();
    ready_ = true;
    load_arrivals();
    return observation();
}

void TaskSchedulingEnv::load_arrivals() {
    const Instant t = now();
    const auto it = arrivals_.find(t);
    if (it == arrivals_.end()) return;
    std::vector<Task> fresh = std::move(it->second);
    arrivals_.erase(it);
    std::vector<Task*> unassigned;
    for (auto& task : fresh) {
        if (task.origin_dc_id == workload::kNoOrigin) continue;
        if (!scenario_.cluster->has_dc(task.origin_dc_id)) {
            throw DataError("task " + task.job_id + " names unknown origin " + std::to_string(task.origin_dc_id));
        }
    }
    for (auto& task : fresh) {
        if (task.origin_dc_id == workload::kNoOrigin) {
            assign_task_origins(std::span<Task>(&task, 1), sites_, t, origin_rng_);
        }
        task.status = TaskStatus::Pending;
        current_.push_back(std::move(task));
        ++injected_;
    }
}

Instant TaskSchedulingEnv::now() const { return scenario_.cluster->time_of(step_); }

double TaskSchedulingEnv::empty_deadline_sentinel() const { return static_cast<double>(horizon_) * 15.0; }

void TaskSchedulingEnv::require_active() const {
    if (!ready_) throw ProtocolError("reset() must be called before step()");
    if (done()) throw ProtocolError("episode is over; call reset()");
}

Observation TaskSchedulingEnv::observation() const {
    if (!ready_ || done()) return {};
    return build_observation(*scenario_.cluster, dc_order_, current_, now());
}

Features TaskSchedulingEnv::aggregated_observation() const {
    if (!ready_) return {};
    const Instant t = done() ? scenario_.cluster->time_of(horizon_ - 1) : now();
    return aggregate_observation(*scenario_.cluster, dc_order_, done() ? std::vector<Task>{} : current_, t,
                                 empty_deadline_sentinel());
}

int TaskSchedulingEnv::action_for(int dc_id) const {
    for (std::size_t j = 0; j < dc_order_.size(); ++j) {
        if (dc_order_[j] == dc_id) return static_cast<int>(j) + 1;
    }
    throw ProtocolError("unknown datacenter id " + std::to_string(dc_id));
}

StepResult TaskSchedulingEnv::step(const ActionList& actions, const HvacActions& hvac) {
    require_active();
    if (actions.size() != current_.size()) {
        throw ProtocolError("expected " + std::to_string(current_.size()) + " actions, got " +
                            std::to_string(actions.size()));
    }
    const int n = static_cast<int>(dc_order_.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i] < 0 || actions[i] > n) {
            throw ProtocolError("action " + std::to_string(actions[i]) + " at index " + std::to_string(i) +
                                " outside 0.." + std::to_string(n));
        }
    }

    const Instant t = now();
    std::vector<Task> deferred;
    std::vector<std::pair<Task, int>> decisions;
    int overrides = 0;
    for (std::size_t i = 0; i < current_.size(); ++i) {
        Task task = std::move(current_[i]);
        if (t > task.sla_deadline) {
            ++overrides;
            const int origin = task.origin_dc_id;
            decisions.emplace_back(std::move(task), origin);
            continue;
        }
        if (actions[i] == 0) {
            task.transition(TaskStatus::Deferred);
            deferred.push_back(std::move(task));
            continue;
        }
        const int dest = dc_order_[static_cast<std::size_t>(actions[i] - 1)];
        decisions.emplace_back(std::move(task), dest);
    }
    if (overrides > 0) spdlog::debug("{} task(s) past their deadline were sent to their origin", overrides);
    current_.clear();

    auto& cl = *scenario_.cluster;
    cl.note_deferred(static_cast<int>(deferred.size()));
    cl.note_overrides(overrides);
    cl.route_assignments(std::move(decisions), step_);
    StepResult out;
    out.info = cl.cluster_step(step_, hvac);
    out.breakdown = (*reward_)(out.info);
    out.reward = out.breakdown.total;

    ++step_;
    for (auto& task : deferred) {
        task.transition(TaskStatus::Pending);
        current_.push_back(std::move(task));
    }
    out.done = done();
    if (!out.done) load_arrivals();
    out.observation = observation();
    return out;
}

AggStepResult TaskSchedulingEnv::step_single_action(int action, const HvacActions& hvac) {
    require_active();
    const int n = static_cast<int>(dc_order_.size());
    const bool no_defer = scenario_.options.disable_defer_action;
    const int hi = no_defer ? n - 1 : n;
    if (action < 0 || action > hi) {
        throw ProtocolError("single action " + std::to_string(action) + " outside 0.." + std::to_string(hi));
    }
    const int per_task = no_defer ? action + 1 : action;
    StepResult r = step(ActionList(current_.size(), per_task), hvac);
    AggStepResult out;
    out.reward = r.reward;
    out.done = r.done;
    out.info = std::move(r.info);
    out.breakdown = std::move(r.breakdown);
    out.observation = aggregated_observation();
    return out;
}

}  // namespace geodc::schedenv
