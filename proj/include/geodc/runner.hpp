#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geodc/cluster.hpp"
#include "geodc/config.hpp"
#include "geodc/controllers.hpp"

namespace geodc::runner {

inline constexpr std::string_view kStepLogSchema = "# geodc-steplog v1";

struct StepRecord {
    cluster::ClusterInfo info;
    double reward = 0.0;
};

/// Episode KPIs, in kKpiNames order.
using KpiRow = std::array<double, 9>;

inline constexpr std::array<std::string_view, 9> kKpiNames = {
    "total_cost_usd",    "total_co2_t",      "total_energy_mwh", "total_water_m3",  "sla_violation_pct",
    "avg_cpu_util_pct",  "avg_gpu_util_pct", "tx_cost_usd",      "tasks_deferred",
};

struct EpisodeResult {
    std::uint64_t seed = 0;
    std::string strategy;
    std::vector<StepRecord> steps;
    KpiRow kpis{};
};

/// Column names of the step log; per-DC columns follow node order.
std::vector<std::string> step_log_columns(const std::vector<int>& dc_ids);

/// Full log text: schema line, header, one row per step.
std::string format_step_log(const std::vector<StepRecord>& steps);

/// Totals are sums of the logged per-step values taken in step order, so
/// they can be recomputed exactly from the log.
KpiRow compute_kpis(const std::vector<StepRecord>& steps);

/// Runs one episode with the configured rule-based strategy.
EpisodeResult run_episode(const config::Configs& configs, const schedenv::ScenarioFactory& factory,
                          std::uint64_t seed);
EpisodeResult run_episode(const config::Configs& configs, std::uint64_t seed);

struct KpiStat {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

/// Population standard deviation; runs are taken in the given order.
std::array<KpiStat, 9> summarize(const std::vector<KpiRow>& rows);

struct SweepResult {
    std::vector<EpisodeResult> episodes;
    std::array<KpiStat, 9> summary{};
};

/// Runs every seed and, when `out_dir` is non-empty, writes the per-seed
/// logs and KPI files plus the summary there.
SweepResult run_sweep(const config::Configs& configs, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir = {});

void write_episode(const std::filesystem::path& out_dir, const EpisodeResult& episode);
void write_summary(const std::filesystem::path& out_dir, const std::string& strategy,
                   const std::vector<std::uint64_t>& seeds, const std::array<KpiStat, 9>& summary);

}  // namespace geodc::runner
