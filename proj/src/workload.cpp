#include "geodc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "geodc/errors.hpp"

namespace geodc::workload {

std::string_view to_string(TaskStatus status) {
    switch (status) {
        case TaskStatus::Pending: return "pending";
        case TaskStatus::Deferred: return "deferred";
        case TaskStatus::InTransit: return "in_transit";
        case TaskStatus::Running: return "running";
        case TaskStatus::Completed: return "completed";
    }
    return "unknown";
}

void Task::transition(TaskStatus next) {
    bool ok = false;
    switch (status) {
        case TaskStatus::Pending:
            ok = next == TaskStatus::Deferred || next == TaskStatus::InTransit || next == TaskStatus::Running;
            break;
        case TaskStatus::Deferred:
        case TaskStatus::InTransit: ok = next == TaskStatus::Pending; break;
        case TaskStatus::Running: ok = next == TaskStatus::Completed; break;
        case TaskStatus::Completed: ok = false; break;
    }
    if (!ok) {
        throw DomainError("task " + job_id + ": illegal transition " + std::string(to_string(status)) + " -> " +
                          std::string(to_string(next)));
    }
    status = next;
}

void validate_task(const Task& t) {
    auto fail = [&](const std::string& why) { throw DataError("task '" + t.job_id + "': " + why); };
    if (!is_step_aligned(t.arrival_time)) fail("arrival_time is not on the 15-minute grid");
    if (!std::isfinite(t.duration_min) || t.duration_min < kMinDurationMin) {
        fail("duration_min below the 15-minute floor");
    }
    for (double v : {t.cores_req, t.gpu_req, t.mem_req, t.bandwidth_gb}) {
        if (!std::isfinite(v) || v < 0.0) fail("negative or non-finite resource demand");
    }
    if (!std::isfinite(t.sla_multiplier) || t.sla_multiplier < 1.0) fail("sla_multiplier below 1");
    if (t.origin_dc_id < 0) fail("negative origin_dc_id");
}

bool TraceInterval::operator==(const TraceInterval& other) const {
    if (interval_start != other.interval_start || tasks.size() != other.tasks.size()) return false;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& a = tasks[i];
        const Task& b = other.tasks[i];
        if (a.job_id != b.job_id || a.arrival_time != b.arrival_time || a.duration_min != b.duration_min ||
            a.cores_req != b.cores_req || a.gpu_req != b.gpu_req || a.mem_req != b.mem_req ||
            a.bandwidth_gb != b.bandwidth_gb || a.origin_dc_id != b.origin_dc_id ||
            a.sla_multiplier != b.sla_multiplier) {
            return false;
        }
    }
    return true;
}

Trace group_into_intervals(std::vector<Task> tasks) {
    std::map<Instant, std::vector<Task>> by_time;
    for (auto& t : tasks) by_time[t.arrival_time].push_back(std::move(t));
    Trace trace;
    trace.reserve(by_time.size());
    for (auto& [when, group] : by_time) trace.push_back(TraceInterval{when, std::move(group)});
    return trace;
}

namespace {

double number_field(const nlohmann::json& rec, const char* key, std::size_t line, std::optional<double> fallback = {}) {
    if (!rec.contains(key) || rec[key].is_null()) {
        if (fallback) return *fallback;
        throw DataError("line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    if (!rec[key].is_number()) throw DataError("line " + std::to_string(line) + ": field '" + key + "' is not a number");
    return rec[key].get<double>();
}

}  // namespace

Trace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::vector<Task> tasks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!rec.is_object()) throw FormatError("line " + std::to_string(line_no) + ": not a JSON object");
        Task t;
        if (!rec.contains("job_id") || !rec["job_id"].is_string()) {
            throw DataError("line " + std::to_string(line_no) + ": missing string field 'job_id'");
        }
        t.job_id = rec["job_id"].get<std::string>();
        if (!rec.contains("arrival_time") || !rec["arrival_time"].is_string()) {
            throw DataError("line " + std::to_string(line_no) + ": missing string field 'arrival_time'");
        }
        t.arrival_time = parse_iso8601(rec["arrival_time"].get<std::string>());
        t.duration_min = number_field(rec, "duration_min", line_no);
        t.cores_req = number_field(rec, "cores_req", line_no);
        t.gpu_req = number_field(rec, "gpu_req", line_no);
        t.mem_req = number_field(rec, "mem_req", line_no);
        t.bandwidth_gb = number_field(rec, "bandwidth_gb", line_no);
        t.sla_multiplier = number_field(rec, "sla_multiplier", line_no, kDefaultSlaMultiplier);
        if (rec.contains("origin_dc_id") && !rec["origin_dc_id"].is_null()) {
            if (!rec["origin_dc_id"].is_number_integer()) {
                throw DataError("line " + std::to_string(line_no) + ": origin_dc_id is not an integer");
            }
            t.origin_dc_id = rec["origin_dc_id"].get<int>();
        }
        try {
            validate_task(t);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        t.sla_deadline = compute_sla_deadline(t);
        tasks.push_back(std::move(t));
    }
    return group_into_intervals(std::move(tasks));
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    for (const auto& interval : trace) {
        for (const auto& t : interval.tasks) {
            nlohmann::json rec;
            rec["job_id"] = t.job_id;
            rec["arrival_time"] = format_iso8601(t.arrival_time);
            rec["duration_min"] = t.duration_min;
            rec["cores_req"] = t.cores_req;
            rec["gpu_req"] = t.gpu_req;
            rec["mem_req"] = t.mem_req;
            rec["bandwidth_gb"] = t.bandwidth_gb;
            rec["sla_multiplier"] = t.sla_multiplier;
            if (t.origin_dc_id == kNoOrigin) {
                rec["origin_dc_id"] = nullptr;
            } else {
                rec["origin_dc_id"] = t.origin_dc_id;
            }
            out << rec.dump() << '\n';
        }
    }
}

Instant compute_sla_deadline(const Task& task) {
    if (!(task.duration_min > 0.0)) throw DomainError("duration_min must be > 0");
    if (!(task.sla_multiplier >= 1.0)) throw DomainError("sla_multiplier must be >= 1");
    return task.arrival_time + minutes_to_seconds(task.sla_multiplier * task.duration_min);
}

double activity_factor(int local_hour) { return (local_hour >= 8 && local_hour < 20) ? 1.0 : 0.3; }

std::vector<double> origin_probabilities(std::span<const OriginSite> sites, Instant utc_now) {
    if (sites.empty()) throw DomainError("origin assignment needs at least one datacenter");
    std::vector<double> scores;
    scores.reserve(sites.size());
    double total = 0.0;
    for (const auto& s : sites) {
        if (!(s.population_weight > 0.0)) throw DomainError("population_weight must be > 0");
        const Instant local = utc_now + std::chrono::hours{s.timezone_shift_h};
        const double score = s.population_weight * activity_factor(hour_of_day(local));
        scores.push_back(score);
        total += score;
    }
    for (double& s : scores) s /= total;
    return scores;
}

void assign_task_origins(std::span<Task> tasks, std::span<const OriginSite> sites, Instant utc_now, Rng& rng) {
    const auto probs = origin_probabilities(sites, utc_now);
    for (auto& t : tasks) t.origin_dc_id = sites[rng.categorical(probs)].dc_id;
}

Trace generate_synthetic_trace(const TimeWindow& window, double mean, const ResourceRanges& r, std::uint64_t seed) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("mean_tasks_per_interval must be >= 0");
    auto check = [](const Range& range, const char* name, double floor) {
        if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi) || range.lo < floor) {
            throw DomainError(std::string("invalid synthetic range for ") + name);
        }
    };
    if (r.duration_min.lo < kMinDurationMin) {
        throw DomainError("synthetic duration range violates the 15-minute floor");
    }
    check(r.duration_min, "duration_min", kMinDurationMin);
    check(r.cores, "cores", 0.0);
    check(r.gpu, "gpu", 0.0);
    check(r.mem_gb, "mem_gb", 0.0);
    check(r.bandwidth_gb, "bandwidth_gb", 0.0);
    check(r.sla_multiplier, "sla_multiplier", 1.0);
    if (!is_step_aligned(window.start)) throw DomainError("synthetic window must start on the 15-minute grid");

    Rng rng(seed);
    Trace trace;
    std::size_t serial = 0;
    for (Instant t = window.start; t < window.end; t += kStep) {
        TraceInterval interval{t, {}};
        const auto count = rng.poisson(mean);
        for (std::uint64_t k = 0; k < count; ++k) {
            Task task;
            task.job_id = "syn-" + std::to_string(serial++);
            task.arrival_time = t;
            task.duration_min = rng.uniform(r.duration_min.lo, r.duration_min.hi);
            task.cores_req = rng.uniform(r.cores.lo, r.cores.hi);
            task.gpu_req = rng.uniform(r.gpu.lo, r.gpu.hi);
            task.mem_req = rng.uniform(r.mem_gb.lo, r.mem_gb.hi);
            task.bandwidth_gb = rng.uniform(r.bandwidth_gb.lo, r.bandwidth_gb.hi);
            task.sla_multiplier = rng.uniform(r.sla_multiplier.lo, r.sla_multiplier.hi);
            task.sla_deadline = compute_sla_deadline(task);
            interval.tasks.push_back(std::move(task));
        }
        trace.push_back(std::move(interval));
    }
    return trace;
}

}  // namespace geodc::workload
