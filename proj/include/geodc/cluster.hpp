#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "geodc/envdata.hpp"
#include "geodc/network.hpp"
#include "geodc/physics.hpp"
#include "geodc/time.hpp"
#include "geodc/workload.hpp"

namespace geodc::cluster {

/// Resource amounts are booked in millionths of a unit so that
/// allocate/release arithmetic is exact.
using Units = std::int64_t;
inline constexpr double kUnitScale = 1'000'000.0;

Units to_units(double amount);
double from_units(Units units);

struct Demand {
    Units cores = 0;
    Units gpus = 0;
    Units mem = 0;

    static Demand of(const workload::Task& task);
    bool operator==(const Demand&) const = default;
};

struct RunningTask {
    workload::Task task;
    Demand demand;
    Instant release_time{};
};

struct InTransit {
    workload::Task task;
    int dest_dc_id = 0;
    std::int64_t ready_step = 0;
};

struct CompletedTask {
    workload::Task task;
    bool sla_met = true;
};

/// Location-bound exogenous series of one site.
struct SiteSeries {
    std::shared_ptr<const envdata::TimeSeries> price;
    std::shared_ptr<const envdata::TimeSeries> carbon;
    std::shared_ptr<const envdata::TimeSeries> drybulb;
    std::shared_ptr<const envdata::TimeSeries> relhumidity;
};

class DatacenterNode {
public:
    DatacenterNode(int dc_id, std::string location_code, double total_cores, double total_gpus, double total_mem_gb,
                   physics::DcPhysicsParams physics, SiteSeries series);

    int dc_id = 0;
    std::string location_code;
    int timezone_shift_h = 0;
    double population_weight = 1.0;
    bool hru_enabled = false;

    physics::DcPhysicsParams physics;
    physics::HvacContext hvac;
    physics::DcState state;
    SiteSeries series;

    std::deque<workload::Task> pending;
    std::vector<RunningTask> running;
    /// Result of the most recent physics evaluation.
    std::optional<physics::DcStepResult> last_result;

    [[nodiscard]] const Demand& total() const { return total_; }
    [[nodiscard]] const Demand& available() const { return available_; }
    [[nodiscard]] double total_cores() const { return from_units(total_.cores); }
    [[nodiscard]] double total_gpus() const { return from_units(total_.gpus); }
    [[nodiscard]] double total_mem_gb() const { return from_units(total_.mem); }
    [[nodiscard]] double available_cores() const { return from_units(available_.cores); }
    [[nodiscard]] double available_gpus() const { return from_units(available_.gpus); }
    [[nodiscard]] double available_mem_gb() const { return from_units(available_.mem); }

    [[nodiscard]] bool fits_now(const Demand& d) const;
    [[nodiscard]] bool fits_ever(const Demand& d) const;

    /// Sum of the demands of running tasks.
    [[nodiscard]] Demand in_use() const;

    /// Price (USD/MWh), carbon intensity (g/kWh) and weather at `t`.
    [[nodiscard]] double price_at(Instant t) const;
    [[nodiscard]] double carbon_at(Instant t) const;
    [[nodiscard]] physics::Weather weather_at(Instant t) const;

    void allocate(const Demand& d);
    void release(const Demand& d);

    /// True the first time this task is found oversized.
    bool flag_oversized(const std::string& job_id);

private:
    Demand total_;
    Demand available_;
    std::set<std::string> oversized_warned_;
};

/// FIFO first-fit: every pending task that fits starts at `now`, in queue
/// order; tasks that do not fit keep their relative order.
std::vector<workload::Task> schedule_fifo_first_fit(DatacenterNode& dc, Instant now);

/// Completes every running task whose release_time <= now.
std::vector<CompletedTask> release_completed(DatacenterNode& dc, Instant now);

/// First 15-minute boundary at or after start + duration.
Instant release_time_for(Instant start, double duration_min);

struct DcInfo {
    int dc_id = 0;
    double energy_consumption_kwh = 0.0;
    double energy_cost_usd = 0.0;
    double carbon_emissions_kg = 0.0;
    double water_l = 0.0;
    int sla_met = 0;
    int sla_violated = 0;
    double cpu_util_pct = 0.0;
    double gpu_util_pct = 0.0;
    double mem_util_pct = 0.0;
    int running_count = 0;
    int pending_count = 0;
    int started_count = 0;
    int assigned_count = 0;
    double it_power_w = 0.0;
    double hvac_power_w = 0.0;
    double setpoint_c = 0.0;
    double crac_return_temp_c = 0.0;
    double price_usd_per_mwh = 0.0;
    double ci_g_per_kwh = 0.0;
};

struct ClusterInfo {
    std::int64_t step = 0;
    Instant time{};
    std::vector<DcInfo> dcs;
    double transmission_cost_total_usd = 0.0;
    double transmission_energy_total_kwh = 0.0;
    double transmission_emissions_total_kg = 0.0;
    int tasks_deferred_count = 0;
    int sla_overrides = 0;
    int remote_assignments = 0;

    [[nodiscard]] double total_energy_cost_usd() const;
    [[nodiscard]] double total_dc_energy_kwh() const;
    [[nodiscard]] double total_dc_emissions_kg() const;
    [[nodiscard]] double total_water_l() const;
    [[nodiscard]] int total_sla_met() const;
    [[nodiscard]] int total_sla_violated() const;
};

struct Census {
    std::size_t pending = 0;
    std::size_t in_transit = 0;
    std::size_t running = 0;
    std::size_t completed = 0;

    [[nodiscard]] std::size_t total() const { return pending + in_transit + running + completed; }
};

class Cluster {
public:
    Cluster(std::vector<DatacenterNode> dcs, std::shared_ptr<const network::Network> network, Instant start);

    [[nodiscard]] std::size_t size() const { return dcs_.size(); }
    [[nodiscard]] const std::vector<DatacenterNode>& nodes() const { return dcs_; }
    [[nodiscard]] std::vector<DatacenterNode>& nodes() { return dcs_; }
    [[nodiscard]] DatacenterNode& node(int dc_id);
    [[nodiscard]] const DatacenterNode& node(int dc_id) const;
    [[nodiscard]] bool has_dc(int dc_id) const;
    [[nodiscard]] const std::deque<InTransit>& in_transit() const { return transit_; }
    [[nodiscard]] Instant start() const { return start_; }
    [[nodiscard]] Instant time_of(std::int64_t step) const { return start_ + step * kStep; }

    /// Local tasks go straight to the destination queue; remote ones pay
    /// the transfer penalties now and enter transit. Penalties accumulate
    /// into the next ClusterInfo.
    void route_assignments(std::vector<std::pair<workload::Task, int>> decisions, std::int64_t step);

    /// Delivers every transfer with ready_step <= step, in dispatch order.
    void advance_transit(std::int64_t step);

    /// Deliver, schedule, evaluate physics, release. `hvac_actions` is
    /// empty or has one entry per DC in node order.
    ClusterInfo cluster_step(std::int64_t step, const std::vector<std::optional<physics::HvacAction>>& hvac_actions = {});

    /// Per-step counters set by the environment before cluster_step.
    void note_deferred(int count) { deferred_ += count; }
    void note_overrides(int count) { overrides_ += count; }

    [[nodiscard]] Census census() const;

private:
    std::size_t index_of(int dc_id) const;

    std::vector<DatacenterNode> dcs_;
    std::shared_ptr<const network::Network> network_;
    Instant start_;
    std::deque<InTransit> transit_;
    std::size_t completed_ = 0;

    double tx_cost_ = 0.0;
    double tx_energy_ = 0.0;
    double tx_emissions_ = 0.0;
    int deferred_ = 0;
    int overrides_ = 0;
    int remote_ = 0;
    std::vector<int> assigned_;
};

}  // namespace geodc::cluster
