#include "geodc/cluster.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "geodc/errors.hpp"

namespace geodc::cluster {

using workload::Task;
using workload::TaskStatus;

Units to_units(double amount) {
    if (!std::isfinite(amount) || amount < 0.0) throw DomainError("resource amounts must be finite and >= 0");
    return static_cast<Units>(std::llround(amount * kUnitScale));
}

double from_units(Units units) { return static_cast<double>(units) / kUnitScale; }

Demand Demand::of(const Task& task) {
    return Demand{to_units(task.cores_req), to_units(task.gpu_req), to_units(task.mem_req)};
}

DatacenterNode::DatacenterNode(int id, std::string location, double total_cores, double total_gpus,
                               double total_mem_gb, physics::DcPhysicsParams params, SiteSeries site)
    : dc_id(id),
      location_code(std::move(location)),
      physics(std::move(params)),
      series(std::move(site)),
      total_{to_units(total_cores), to_units(total_gpus), to_units(total_mem_gb)},
      available_(total_) {
    if (dc_id < 1) throw ConfigError("dc_id must be >= 1");
    physics::validate(physics);
    hvac = physics::make_hvac_context(physics, total_mem_gb);
}

bool DatacenterNode::fits_now(const Demand& d) const {
    return d.cores <= available_.cores && d.gpus <= available_.gpus && d.mem <= available_.mem;
}

bool DatacenterNode::fits_ever(const Demand& d) const {
    return d.cores <= total_.cores && d.gpus <= total_.gpus && d.mem <= total_.mem;
}

Demand DatacenterNode::in_use() const {
    Demand sum;
    for (const auto& r : running) {
        sum.cores += r.demand.cores;
        sum.gpus += r.demand.gpus;
        sum.mem += r.demand.mem;
    }
    return sum;
}

namespace {

const envdata::TimeSeries& need(const std::shared_ptr<const envdata::TimeSeries>& s, const DatacenterNode& dc,
                                const char* what) {
    if (!s) throw ConfigError("datacenter " + std::to_string(dc.dc_id) + " has no " + what + " series");
    return *s;
}

}  // namespace

double DatacenterNode::price_at(Instant t) const { return need(series.price, *this, "price").value_at(t); }

double DatacenterNode::carbon_at(Instant t) const { return need(series.carbon, *this, "carbon").value_at(t); }

physics::Weather DatacenterNode::weather_at(Instant t) const {
    const double tdb = need(series.drybulb, *this, "dry-bulb").value_at(t);
    const double rh = need(series.relhumidity, *this, "humidity").value_at(t);
    return physics::Weather{tdb, envdata::wet_bulb(tdb, rh)};
}

void DatacenterNode::allocate(const Demand& d) {
    if (!fits_now(d)) throw DomainError("allocation exceeds available resources");
    available_.cores -= d.cores;
    available_.gpus -= d.gpus;
    available_.mem -= d.mem;
}

void DatacenterNode::release(const Demand& d) {
    if (available_.cores + d.cores > total_.cores || available_.gpus + d.gpus > total_.gpus ||
        available_.mem + d.mem > total_.mem) {
        throw DomainError("release exceeds installed resources");
    }
    available_.cores += d.cores;
    available_.gpus += d.gpus;
    available_.mem += d.mem;
}

bool DatacenterNode::flag_oversized(const std::string& job_id) { return oversized_warned_.insert(job_id).second; }

Instant release_time_for(Instant start, double duration_min) {
    const Instant done = start + minutes_to_seconds(duration_min);
    const auto over = (done.time_since_epoch() % kStep).count();
    return over == 0 ? done : done + (kStep - Seconds{over});
}

std::vector<Task> schedule_fifo_first_fit(DatacenterNode& dc, Instant now) {
    std::vector<Task> started;
    std::deque<Task> waiting;
    while (!dc.pending.empty()) {
        Task task = std::move(dc.pending.front());
        dc.pending.pop_front();
        const Demand d = Demand::of(task);
        if (dc.fits_now(d)) {
            dc.allocate(d);
            task.transition(TaskStatus::Running);
            task.start_exec_time = now;
            task.dest_dc_id = dc.dc_id;
            dc.running.push_back(RunningTask{task, d, release_time_for(now, task.duration_min)});
            started.push_back(std::move(task));
            continue;
        }
        if (!dc.fits_ever(d) && dc.flag_oversized(task.job_id)) {
            spdlog::warn("task {} exceeds the total capacity of datacenter {} and will never start", task.job_id,
                         dc.dc_id);
        }
        waiting.push_back(std::move(task));
    }
    dc.pending = std::move(waiting);
    return started;
}

std::vector<CompletedTask> release_completed(DatacenterNode& dc, Instant now) {
    std::vector<CompletedTask> done;
    std::vector<RunningTask> still;
    still.reserve(dc.running.size());
    for (auto& r : dc.running) {
        if (r.release_time > now) {
            still.push_back(std::move(r));
            continue;
        }
        dc.release(r.demand);
        Task& t = r.task;
        t.transition(TaskStatus::Completed);
        t.completion_time = *t.start_exec_time + minutes_to_seconds(t.duration_min);
        const bool met = *t.completion_time <= t.sla_deadline;
        done.push_back(CompletedTask{std::move(t), met});
    }
    dc.running = std::move(still);
    return done;
}

double ClusterInfo::total_energy_cost_usd() const {
    double s = 0.0;
    for (const auto& d : dcs) s += d.energy_cost_usd;
    return s;
}

double ClusterInfo::total_dc_energy_kwh() const {
    double s = 0.0;
    for (const auto& d : dcs) s += d.energy_consumption_kwh;
    return s;
}

double ClusterInfo::total_dc_emissions_kg() const {
    double s = 0.0;
    for (const auto& d : dcs) s += d.carbon_emissions_kg;
    return s;
}

double ClusterInfo::total_water_l() const {
    double s = 0.0;
    for (const auto& d : dcs) s += d.water_l;
    return s;
}

int ClusterInfo::total_sla_met() const {
    int s = 0;
    for (const auto& d : dcs) s += d.sla_met;
    return s;
}

int ClusterInfo::total_sla_violated() const {
    int s = 0;
    for (const auto& d : dcs) s += d.sla_violated;
    return s;
}

Cluster::Cluster(std::vector<DatacenterNode> dcs, std::shared_ptr<const network::Network> network, Instant start)
    : dcs_(std::move(dcs)), network_(std::move(network)), start_(start), assigned_(dcs_.size(), 0) {
    if (dcs_.empty()) throw ConfigError("cluster needs at least one datacenter");
    if (!is_step_aligned(start)) throw ConfigError("simulation start must be on the 15-minute grid");
    std::set<int> ids;
    for (const auto& dc : dcs_) {
        if (!ids.insert(dc.dc_id).second) throw ConfigError("duplicate dc_id " + std::to_string(dc.dc_id));
    }
    if (network_) {
        std::vector<std::string> locations;
        for (const auto& dc : dcs_) locations.push_back(dc.location_code);
        network::check_coverage(network_->regions, network_->costs, locations);
    }
}

std::size_t Cluster::index_of(int dc_id) const {
    for (std::size_t i = 0; i < dcs_.size(); ++i) {
        if (dcs_[i].dc_id == dc_id) return i;
    }
    throw ProtocolError("unknown datacenter id " + std::to_string(dc_id));
}

bool Cluster::has_dc(int dc_id) const {
    return std::any_of(dcs_.begin(), dcs_.end(), [&](const DatacenterNode& d) { return d.dc_id == dc_id; });
}

DatacenterNode& Cluster::node(int dc_id) { return dcs_[index_of(dc_id)]; }

const DatacenterNode& Cluster::node(int dc_id) const { return dcs_[index_of(dc_id)]; }

void Cluster::route_assignments(std::vector<std::pair<Task, int>> decisions, std::int64_t step) {
    const Instant now = time_of(step);
    for (auto& [task, dest] : decisions) {
        const std::size_t di = index_of(dest);
        DatacenterNode& target = dcs_[di];
        ++assigned_[di];
        task.dest_dc_id = dest;
        if (task.origin_dc_id == dest) {
            target.pending.push_back(std::move(task));
            continue;
        }
        const DatacenterNode& origin = node(task.origin_dc_id);
        if (!network_) throw ConfigError("remote assignment without a network model");
        const auto& net = *network_;
        const double energy = network::transmission_energy(task.bandwidth_gb);
        tx_cost_ += network::transmission_cost(net.costs, net.regions, task.bandwidth_gb, origin.location_code,
                                               target.location_code);
        tx_energy_ += energy;
        tx_emissions_ += network::transmission_emissions(energy, origin.carbon_at(now));
        const double delay = network::transmission_delay(net.delays, net.regions, task.bandwidth_gb,
                                                         origin.location_code, target.location_code);
        ++remote_;
        task.transition(TaskStatus::InTransit);
        transit_.push_back(InTransit{std::move(task), dest, step + network::transit_steps(delay)});
    }
}

void Cluster::advance_transit(std::int64_t step) {
    std::deque<InTransit> still;
    for (auto& tr : transit_) {
        if (tr.ready_step > step) {
            still.push_back(std::move(tr));
            continue;
        }
        tr.task.transition(TaskStatus::Pending);
        node(tr.dest_dc_id).pending.push_back(std::move(tr.task));
    }
    transit_ = std::move(still);
}

namespace {

double utilization(Units used, Units total) {
    return total > 0 ? static_cast<double>(used) / static_cast<double>(total) : 0.0;
}

}  // namespace

ClusterInfo Cluster::cluster_step(std::int64_t step, const std::vector<std::optional<physics::HvacAction>>& hvac) {
    if (!hvac.empty() && hvac.size() != dcs_.size()) {
        throw ProtocolError("expected one HVAC action per datacenter");
    }
    const Instant now = time_of(step);
    advance_transit(step);

    ClusterInfo info;
    info.step = step;
    info.time = now;
    info.dcs.reserve(dcs_.size());
    for (std::size_t i = 0; i < dcs_.size(); ++i) {
        DatacenterNode& dc = dcs_[i];
        DcInfo d;
        d.dc_id = dc.dc_id;
        d.assigned_count = assigned_[i];
        d.started_count = static_cast<int>(schedule_fifo_first_fit(dc, now).size());

        const Demand used = dc.in_use();
        const double u_cpu = utilization(used.cores, dc.total().cores);
        const double u_gpu = utilization(used.gpus, dc.total().gpus);
        const double u_mem = utilization(used.mem, dc.total().mem);
        d.cpu_util_pct = u_cpu * 100.0;
        d.gpu_util_pct = u_gpu * 100.0;
        d.mem_util_pct = u_mem * 100.0;

        const physics::Weather weather = dc.weather_at(now);
        const physics::DcLoad load{u_cpu, u_gpu, u_mem, dc.total_mem_gb()};
        const auto action = hvac.empty() ? std::nullopt : hvac[i];
        physics::DcStepResult r =
            physics::dc_physics_step(dc.physics, dc.hvac, dc.state, load, weather, action, dc.hru_enabled);
        dc.state.setpoint_c = r.setpoint_c;

        d.price_usd_per_mwh = dc.price_at(now);
        d.ci_g_per_kwh = dc.carbon_at(now);
        d.energy_consumption_kwh = r.energy_kwh;
        d.energy_cost_usd = r.energy_kwh * d.price_usd_per_mwh / 1000.0;
        d.carbon_emissions_kg = r.energy_kwh * d.ci_g_per_kwh / 1000.0;
        d.water_l = r.water_l_15min;
        d.it_power_w = r.it_power_w;
        d.hvac_power_w = r.total_power_w - r.it_power_w;
        d.setpoint_c = r.setpoint_c;
        d.crac_return_temp_c = r.crac_return_temp_c;
        dc.last_result = std::move(r);

        for (const auto& c : release_completed(dc, now + kStep)) {
            ++completed_;
            if (c.sla_met) {
                ++d.sla_met;
            } else {
                ++d.sla_violated;
            }
        }
        d.running_count = static_cast<int>(dc.running.size());
        d.pending_count = static_cast<int>(dc.pending.size());
        info.dcs.push_back(d);
    }

    info.transmission_cost_total_usd = tx_cost_;
    info.transmission_energy_total_kwh = tx_energy_;
    info.transmission_emissions_total_kg = tx_emissions_;
    info.tasks_deferred_count = deferred_;
    info.sla_overrides = overrides_;
    info.remote_assignments = remote_;
    tx_cost_ = tx_energy_ = tx_emissions_ = 0.0;
    deferred_ = overrides_ = remote_ = 0;
    std::fill(assigned_.begin(), assigned_.end(), 0);
    return info;
}

Census Cluster::census() const {
    Census c;
    for (const auto& dc : dcs_) {
        c.pending += dc.pending.size();
        c.running += dc.running.size();
    }
    c.in_transit = transit_.size();
    c.completed = completed_;
    return c;
}

}  // namespace geodc::cluster
