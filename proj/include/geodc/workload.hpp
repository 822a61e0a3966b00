#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geodc/rng.hpp"
#include "geodc/time.hpp"

namespace geodc::workload {

enum class TaskStatus { Pending, Deferred, InTransit, Running, Completed };

std::string_view to_string(TaskStatus status);

/// Shortest task the simulator accepts, in minutes.
inline constexpr double kMinDurationMin = 15.0;
inline constexpr double kDefaultSlaMultiplier = 1.5;
/// Origin id of a task that has not been assigned one yet.
inline constexpr int kNoOrigin = 0;

struct Task {
    std::string job_id;
    Instant arrival_time{};
    double duration_min = kMinDurationMin;
    double cores_req = 0.0;
    double gpu_req = 0.0;
    double mem_req = 0.0;
    double bandwidth_gb = 0.0;
    int origin_dc_id = kNoOrigin;
    double sla_multiplier = kDefaultSlaMultiplier;
    Instant sla_deadline{};
    std::optional<int> dest_dc_id;
    TaskStatus status = TaskStatus::Pending;
    std::optional<Instant> start_exec_time;
    std::optional<Instant> completion_time;

    /// Moves to `next`, throwing DomainError for a transition outside the
    /// lifecycle graph.
    void transition(TaskStatus next);
};

/// Throws DataError if the static fields (everything except lifecycle
/// state and the deadline) break a Task invariant.
void validate_task(const Task& task);

struct TraceInterval {
    Instant interval_start{};
    std::vector<Task> tasks;

    bool operator==(const TraceInterval& other) const;
};

using Trace = std::vector<TraceInterval>;

/// Reads line-delimited JSON, one task per line, grouped into 15-minute
/// intervals in time order. A null or absent `origin_dc_id` leaves the task
/// unassigned.
Trace load_trace(const std::filesystem::path& path);
void save_trace(const std::filesystem::path& path, const Trace& trace);

/// Groups tasks by arrival time; tasks keep their relative order.
Trace group_into_intervals(std::vector<Task> tasks);

/// arrival + multiplier * duration.
Instant compute_sla_deadline(const Task& task);

/// One candidate origin site for the arrival model.
struct OriginSite {
    int dc_id = 0;
    int timezone_shift_h = 0;
    double population_weight = 1.0;
};

/// 1.0 during local business hours [08:00, 20:00), 0.3 otherwise.
double activity_factor(int local_hour);

/// Normalized score_d = population_weight_d * activity_factor_d(local time).
std::vector<double> origin_probabilities(std::span<const OriginSite> sites, Instant utc_now);

/// Samples an origin for every task from origin_probabilities.
void assign_task_origins(std::span<Task> tasks, std::span<const OriginSite> sites, Instant utc_now, Rng& rng);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ResourceRanges {
    Range duration_min{15.0, 240.0};
    Range cores{1.0, 16.0};
    Range gpu{0.0, 2.0};
    Range mem_gb{1.0, 64.0};
    Range bandwidth_gb{0.1, 10.0};
    Range sla_multiplier{kDefaultSlaMultiplier, kDefaultSlaMultiplier};
};

/// Poisson arrivals per 15-minute interval over `window`, resources drawn
/// uniformly from `ranges`. Origins are left unassigned. Every interval of
/// the window is present, including empty ones.
Trace generate_synthetic_trace(const TimeWindow& window, double mean_tasks_per_interval,
                               const ResourceRanges& ranges, std::uint64_t seed);

}  // namespace geodc::workload
