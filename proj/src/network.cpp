#include "geodc/network.hpp"

#include <cmath>

#include "geodc/csv.hpp"
#include "geodc/errors.hpp"

namespace geodc::network {

std::string_view to_string(MacroCluster c) {
    switch (c) {
        case MacroCluster::US: return "US";
        case MacroCluster::EU: return "EU";
        case MacroCluster::AP: return "AP";
        case MacroCluster::SA: return "SA";
    }
    return "?";
}

MacroCluster parse_macro_cluster(std::string_view text) {
    const std::string t = trim(text);
    if (t == "US") return MacroCluster::US;
    if (t == "EU") return MacroCluster::EU;
    if (t == "AP") return MacroCluster::AP;
    if (t == "SA") return MacroCluster::SA;
    throw ConfigError("unknown macro cluster '" + t + "'");
}

CostMatrix::CostMatrix(std::vector<std::string> regions, std::vector<std::vector<double>> cost)
    : regions_(std::move(regions)), cost_(std::move(cost)) {
    if (cost_.size() != regions_.size()) throw ConfigError("cost matrix must be square");
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        if (!index_.emplace(regions_[i], i).second) throw ConfigError("duplicate region '" + regions_[i] + "'");
        if (cost_[i].size() != regions_.size()) throw ConfigError("cost matrix must be square");
        for (std::size_t j = 0; j < regions_.size(); ++j) {
            const double v = cost_[i][j];
            if (!std::isfinite(v) || v < 0.0) {
                throw ConfigError("cost " + regions_[i] + "->" + regions_[j] + " must be finite and >= 0");
            }
        }
        if (cost_[i][i] != 0.0) throw ConfigError("cost matrix diagonal must be 0 for '" + regions_[i] + "'");
    }
}

double CostMatrix::cost_per_gb(const std::string& origin, const std::string& dest) const {
    const auto o = index_.find(origin);
    const auto d = index_.find(dest);
    if (o == index_.end()) throw ConfigError("region '" + origin + "' not in cost matrix");
    if (d == index_.end()) throw ConfigError("region '" + dest + "' not in cost matrix");
    return cost_[o->second][d->second];
}

CostMatrix load_cost_matrix(const std::filesystem::path& path) {
    CsvTable t;
    try {
        t = read_csv(path, true);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    if (t.header.size() < 2) throw ConfigError("cost matrix '" + path.string() + "' has no regions");
    std::vector<std::string> regions;
    for (std::size_t j = 1; j < t.header.size(); ++j) regions.push_back(trim(t.header[j]));
    if (t.rows.size() != regions.size()) throw ConfigError("cost matrix must be square");
    std::vector<std::vector<double>> cost(regions.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != regions.size() + 1) {
            throw ConfigError("cost matrix line " + std::to_string(t.lines[i]) + ": wrong number of fields");
        }
        if (trim(row[0]) != regions[i]) {
            throw ConfigError("cost matrix row " + std::to_string(i + 1) + " must be '" + regions[i] + "'");
        }
        for (std::size_t j = 1; j < row.size(); ++j) {
            try {
                cost[i].push_back(parse_double(row[j], "cost per GB"));
            } catch (const DataError& e) {
                throw ConfigError("cost matrix line " + std::to_string(t.lines[i]) + ": " + e.what());
            }
        }
    }
    return CostMatrix(std::move(regions), std::move(cost));
}

namespace {

void check_link(const LinkParams& link) {
    if (!(link.throughput_mbps > 0.0) || !std::isfinite(link.throughput_mbps)) {
        throw ConfigError("throughput must be > 0");
    }
    if (!(link.rtt_ms >= 0.0) || !std::isfinite(link.rtt_ms)) throw ConfigError("RTT must be >= 0");
}

}  // namespace

DelayTable::DelayTable(LinkParams intra) : intra_(intra) { check_link(intra_); }

void DelayTable::set(MacroCluster origin, MacroCluster dest, LinkParams link) {
    check_link(link);
    links_[{origin, dest}] = link;
}

LinkParams DelayTable::link(MacroCluster origin, MacroCluster dest) const {
    if (origin == dest) {
        const auto it = links_.find({origin, dest});
        return it != links_.end() ? it->second : intra_;
    }
    if (const auto it = links_.find({origin, dest}); it != links_.end()) return it->second;
    if (const auto it = links_.find({dest, origin}); it != links_.end()) return it->second;
    throw ConfigError("no delay parameters between " + std::string(to_string(origin)) + " and " +
                      std::string(to_string(dest)));
}

DelayTable load_delay_table(const std::filesystem::path& path, LinkParams intra) {
    CsvTable t;
    try {
        t = read_csv(path, true);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    const auto o = t.column("origin_cluster");
    const auto d = t.column("dest_cluster");
    const auto tp = t.column("throughput_mbps");
    const auto rtt = t.column("rtt_ms");
    if (!o || !d || !tp || !rtt) {
        throw ConfigError("delay table '" + path.string() +
                          "' needs origin_cluster,dest_cluster,throughput_mbps,rtt_ms columns");
    }
    DelayTable table(intra);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            table.set(parse_macro_cluster(row.at(*o)), parse_macro_cluster(row.at(*d)),
                      LinkParams{parse_double(row.at(*tp), "throughput_mbps"), parse_double(row.at(*rtt), "rtt_ms")});
        } catch (const std::out_of_range&) {
            throw ConfigError("delay table line " + std::to_string(t.lines[i]) + ": missing field");
        } catch (const DataError& e) {
            throw ConfigError("delay table line " + std::to_string(t.lines[i]) + ": " + e.what());
        }
    }
    return table;
}

void RegionMap::add(const std::string& location, RegionInfo info) {
    if (!entries_.emplace(location, std::move(info)).second) {
        throw ConfigError("duplicate location '" + location + "' in region map");
    }
}

const RegionInfo& RegionMap::at(const std::string& location) const {
    const auto it = entries_.find(location);
    if (it == entries_.end()) throw ConfigError("location '" + location + "' missing from region map");
    return it->second;
}

RegionMap load_region_map(const std::filesystem::path& path) {
    CsvTable t;
    try {
        t = read_csv(path, true);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    const auto loc = t.column("location_code");
    const auto reg = t.column("cloud_region");
    const auto mc = t.column("macro_cluster");
    if (!loc || !reg || !mc) {
        throw ConfigError("region map '" + path.string() + "' needs location_code,cloud_region,macro_cluster columns");
    }
    RegionMap map;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() <= std::max({*loc, *reg, *mc})) {
            throw ConfigError("region map line " + std::to_string(t.lines[i]) + ": missing field");
        }
        map.add(trim(row[*loc]), RegionInfo{trim(row[*reg]), parse_macro_cluster(row[*mc])});
    }
    return map;
}

void check_coverage(const RegionMap& map, const CostMatrix& matrix, const std::vector<std::string>& locations) {
    for (const auto& loc : locations) {
        const RegionInfo& info = map.at(loc);
        if (!matrix.has_region(info.cloud_region)) {
            throw ConfigError("region '" + info.cloud_region + "' of location '" + loc + "' not in cost matrix");
        }
    }
}

double transmission_cost(const CostMatrix& matrix, const RegionMap& map, double s_bw_gb, const std::string& origin_loc,
                         const std::string& dest_loc) {
    const auto& o = map.at(origin_loc);
    const auto& d = map.at(dest_loc);
    if (!(s_bw_gb >= 0.0)) throw DomainError("bandwidth must be >= 0");
    if (o.cloud_region == d.cloud_region) return 0.0;
    return s_bw_gb * matrix.cost_per_gb(o.cloud_region, d.cloud_region);
}

double transmission_energy(double s_bw_gb) {
    if (!(s_bw_gb >= 0.0)) throw DomainError("bandwidth must be >= 0");
    return s_bw_gb * kEnergyKwhPerGb;
}

double transmission_emissions(double energy_kwh, double ci_origin) { return energy_kwh * ci_origin / 1000.0; }

double transmission_delay(const LinkParams& link, double s_bw_gb) {
    if (!(s_bw_gb >= 0.0)) throw DomainError("bandwidth must be >= 0");
    return s_bw_gb * 8000.0 / link.throughput_mbps + link.rtt_ms / 1000.0;
}

double transmission_delay(const DelayTable& table, const RegionMap& map, double s_bw_gb, const std::string& origin_loc,
                          const std::string& dest_loc) {
    const auto& o = map.at(origin_loc);
    const auto& d = map.at(dest_loc);
    return transmission_delay(table.link(o.macro_cluster, d.macro_cluster), s_bw_gb);
}

std::int64_t transit_steps(double delay_s) {
    if (!(delay_s >= 0.0)) throw DomainError("delay must be >= 0");
    return static_cast<std::int64_t>(std::ceil(delay_s / 900.0));
}

}  // namespace geodc::network
