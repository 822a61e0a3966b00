#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace geodc::network {

enum class MacroCluster { US, EU, AP, SA };

std::string_view to_string(MacroCluster c);
/// Throws ConfigError for anything other than US, EU, AP or SA.
MacroCluster parse_macro_cluster(std::string_view text);

/// USD per GB between cloud regions. Square, zero diagonal, finite entries >= 0.
class CostMatrix {
public:
    CostMatrix(std::vector<std::string> regions, std::vector<std::vector<double>> cost_per_gb);

    [[nodiscard]] const std::vector<std::string>& regions() const { return regions_; }
    [[nodiscard]] bool has_region(const std::string& region) const { return index_.contains(region); }
    [[nodiscard]] double cost_per_gb(const std::string& origin, const std::string& dest) const;

private:
    std::vector<std::string> regions_;
    std::vector<std::vector<double>> cost_;
    std::map<std::string, std::size_t> index_;
};

/// First row and first column hold region names.
CostMatrix load_cost_matrix(const std::filesystem::path& path);

struct LinkParams {
    double throughput_mbps = 1000.0;
    double rtt_ms = 10.0;
};

/// Inter-cluster throughput/RTT. Pairs missing in one direction fall back to
/// the reverse direction; the same cluster uses the intra defaults.
class DelayTable {
public:
    explicit DelayTable(LinkParams intra = {});

    void set(MacroCluster origin, MacroCluster dest, LinkParams link);
    [[nodiscard]] LinkParams link(MacroCluster origin, MacroCluster dest) const;
    [[nodiscard]] const LinkParams& intra() const { return intra_; }

private:
    LinkParams intra_;
    std::map<std::pair<MacroCluster, MacroCluster>, LinkParams> links_;
};

/// Rows `origin_cluster,dest_cluster,throughput_mbps,rtt_ms`.
DelayTable load_delay_table(const std::filesystem::path& path, LinkParams intra = {});

struct RegionInfo {
    std::string cloud_region;
    MacroCluster macro_cluster = MacroCluster::US;
};

/// location_code -> region info. Rows `location_code,cloud_region,macro_cluster`.
class RegionMap {
public:
    void add(const std::string& location, RegionInfo info);
    [[nodiscard]] const RegionInfo& at(const std::string& location) const;
    [[nodiscard]] bool contains(const std::string& location) const { return entries_.contains(location); }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, RegionInfo> entries_;
};

RegionMap load_region_map(const std::filesystem::path& path);

/// Fails with ConfigError unless every location is mapped to a region the
/// matrix knows.
void check_coverage(const RegionMap& map, const CostMatrix& matrix, const std::vector<std::string>& locations);

inline constexpr double kEnergyKwhPerGb = 0.06;

double transmission_cost(const CostMatrix& matrix, const RegionMap& map, double s_bw_gb, const std::string& origin_loc,
                         const std::string& dest_loc);
double transmission_energy(double s_bw_gb);
/// kg CO2eq from kWh and the origin grid's gCO2eq/kWh.
double transmission_emissions(double energy_kwh, double ci_origin);
/// Seconds: serialization plus propagation.
double transmission_delay(const DelayTable& table, const RegionMap& map, double s_bw_gb, const std::string& origin_loc,
                          const std::string& dest_loc);
double transmission_delay(const LinkParams& link, double s_bw_gb);

/// Whole 15-minute steps spent in transit for a delay in seconds.
std::int64_t transit_steps(double delay_s);

/// Everything needed to price a transfer.
struct Network {
    CostMatrix costs;
    DelayTable delays;
    RegionMap regions;
};

}  // namespace geodc::network
