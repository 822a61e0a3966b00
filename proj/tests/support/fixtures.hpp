#pragma once

// Small hand-built scenarios shared by the test binaries.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "geodc/cluster.hpp"
#include "geodc/envdata.hpp"
#include "geodc/network.hpp"
#include "geodc/physics.hpp"
#include "geodc/schedenv.hpp"
#include "geodc/workload.hpp"

namespace fixtures {

using namespace geodc;

inline std::filesystem::path source_dir() { return GEODC_SOURCE_DIR; }

inline Instant t0() { return make_instant(2023, 7, 1); }

/// Locations L1..L5 in regions r1..r5, macro clusters US, EU, AP, SA, US.
inline std::shared_ptr<const network::Network> test_network(double cost_per_gb = 0.02) {
    const std::vector<std::string> regions = {"r1", "r2", "r3", "r4", "r5"};
    std::vector<std::vector<double>> m(5, std::vector<double>(5, cost_per_gb));
    for (std::size_t i = 0; i < 5; ++i) m[i][i] = 0.0;
    network::DelayTable delays;
    delays.set(network::MacroCluster::US, network::MacroCluster::EU, {400.0, 90.0});
    delays.set(network::MacroCluster::US, network::MacroCluster::AP, {250.0, 170.0});
    delays.set(network::MacroCluster::EU, network::MacroCluster::AP, {200.0, 180.0});
    delays.set(network::MacroCluster::US, network::MacroCluster::SA, {300.0, 130.0});
    delays.set(network::MacroCluster::EU, network::MacroCluster::SA, {220.0, 200.0});
    delays.set(network::MacroCluster::AP, network::MacroCluster::SA, {120.0, 320.0});
    network::RegionMap map;
    const network::MacroCluster macro[] = {network::MacroCluster::US, network::MacroCluster::EU,
                                           network::MacroCluster::AP, network::MacroCluster::SA,
                                           network::MacroCluster::US};
    for (int i = 0; i < 5; ++i) {
        map.add("L" + std::to_string(i + 1), network::RegionInfo{regions[static_cast<std::size_t>(i)], macro[i]});
    }
    return std::make_shared<const network::Network>(
        network::Network{network::CostMatrix(regions, m), delays, map});
}

/// Two racks of five single-GPU servers.
inline physics::DcPhysicsParams small_physics() {
    physics::DcPhysicsParams p;
    p.num_racks = 2;
    p.servers_per_rack = 5;
    p.gpus_per_server = 1;
    return p;
}

inline std::shared_ptr<const envdata::TimeSeries> constant(envdata::SeriesKind kind, double value, int days = 10,
                                                           const std::string& location = "L") {
    const TimeWindow w{t0() - std::chrono::hours(24), t0() + std::chrono::days(days)};
    return std::make_shared<const envdata::TimeSeries>(envdata::synth_series(kind, value, 0.0, 0.0, w, 1, location));
}

struct SiteSpec {
    double price = 60.0;
    double ci = 300.0;
    double drybulb = 20.0;
    double humidity = 50.0;
};

inline cluster::SiteSeries site_series(const SiteSpec& s, int days = 10) {
    using envdata::SeriesKind;
    return cluster::SiteSeries{constant(SeriesKind::Price, s.price, days), constant(SeriesKind::CarbonIntensity, s.ci, days),
                               constant(SeriesKind::DryBulbTempC, s.drybulb, days),
                               constant(SeriesKind::RelHumidityPct, s.humidity, days)};
}

inline cluster::DatacenterNode make_node(int id, double cores = 100.0, double gpus = 10.0, double mem = 400.0,
                                         const SiteSpec& site = {}) {
    cluster::DatacenterNode n(id, "L" + std::to_string(id), cores, gpus, mem, small_physics(), site_series(site));
    return n;
}

inline std::vector<cluster::DatacenterNode> make_nodes(int count, double cores = 100.0,
                                                       const std::vector<SiteSpec>& sites = {}) {
    std::vector<cluster::DatacenterNode> out;
    for (int i = 1; i <= count; ++i) {
        const SiteSpec s = sites.empty() ? SiteSpec{} : sites[static_cast<std::size_t>(i - 1)];
        out.push_back(make_node(i, cores, 10.0, 400.0, s));
    }
    return out;
}

inline workload::Task make_task(const std::string& id, Instant arrival, int origin, double duration = 30.0,
                                double cores = 2.0, double gpu = 0.0, double mem = 4.0, double bw = 1.0,
                                double sla = 1.5) {
    workload::Task t;
    t.job_id = id;
    t.arrival_time = arrival;
    t.duration_min = duration;
    t.cores_req = cores;
    t.gpu_req = gpu;
    t.mem_req = mem;
    t.bandwidth_gb = bw;
    t.origin_dc_id = origin;
    t.sla_multiplier = sla;
    t.sla_deadline = workload::compute_sla_deadline(t);
    return t;
}

/// Factory over fresh copies of a fixed cluster layout and trace.
inline schedenv::ScenarioFactory make_factory(int n_dcs, workload::Trace trace, schedenv::EnvOptions options = {},
                                              std::vector<SiteSpec> sites = {}, double cores = 100.0) {
    auto net = test_network();
    return [=](std::uint64_t) {
        schedenv::Scenario sc;
        sc.cluster = std::make_unique<cluster::Cluster>(make_nodes(n_dcs, cores, sites), net, t0());
        sc.trace = trace;
        sc.options = options;
        return sc;
    };
}

}  // namespace fixtures
