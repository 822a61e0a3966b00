#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "geodc/errors.hpp"
#include "geodc/network.hpp"
#include "temp_dir.hpp"

using namespace geodc;
using namespace geodc::network;

namespace {

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("transmission cost") {
    const auto net = fixtures::test_network(0.02);
    CHECK(transmission_cost(net->costs, net->regions, 10.0, "L1", "L2") == doctest::Approx(0.20).epsilon(1e-15));
    CHECK(transmission_cost(net->costs, net->regions, 0.0, "L1", "L2") == 0.0);
    CHECK(transmission_cost(net->costs, net->regions, 10.0, "L3", "L3") == 0.0);
    CHECK(transmission_cost(net->costs, net->regions, 5.0, "L1", "L2") * 2.0 ==
          transmission_cost(net->costs, net->regions, 10.0, "L1", "L2"));
    CHECK_THROWS_AS(transmission_cost(net->costs, net->regions, -1.0, "L1", "L2"), DomainError);
    CHECK_THROWS_AS(transmission_cost(net->costs, net->regions, 1.0, "L1", "nowhere"), ConfigError);
}

TEST_CASE("transmission energy and emissions") {
    CHECK(transmission_energy(10.0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(transmission_energy(1.0) == doctest::Approx(0.06).epsilon(1e-15));
    CHECK(transmission_energy(0.0) == 0.0);
    CHECK_THROWS_AS(transmission_energy(-0.5), DomainError);
    CHECK(transmission_emissions(0.6, 400.0) == doctest::Approx(0.24).epsilon(1e-15));
    CHECK(transmission_emissions(0.0, 400.0) == 0.0);
    CHECK(transmission_emissions(0.6, 0.0) == 0.0);
}

TEST_CASE("transmission delay") {
    CHECK(std::abs(transmission_delay(LinkParams{1000.0, 10.0}, 1.0) - 8.01) <= 1e-9);
    CHECK(std::abs(transmission_delay(LinkParams{100.0, 150.0}, 10.0) - 800.15) <= 1e-9);
    CHECK(transmission_delay(LinkParams{250.0, 170.0}, 0.0) == doctest::Approx(0.17).epsilon(1e-15));

    const auto net = fixtures::test_network();
    // L1 and L5 share the US cluster: intra defaults.
    CHECK(std::abs(transmission_delay(net->delays, net->regions, 1.0, "L1", "L5") - 8.01) <= 1e-9);
    // US-EU stored one way, looked up both ways.
    const double us_eu = 2.0 * 8000.0 / 400.0 + 0.09;
    CHECK(transmission_delay(net->delays, net->regions, 2.0, "L1", "L2") == doctest::Approx(us_eu).epsilon(1e-15));
    CHECK(transmission_delay(net->delays, net->regions, 2.0, "L2", "L1") == doctest::Approx(us_eu).epsilon(1e-15));
    CHECK_THROWS_AS(transmission_delay(net->delays, net->regions, 1.0, "L1", "L9"), ConfigError);
}

TEST_CASE("missing cluster pair") {
    DelayTable t;
    t.set(MacroCluster::US, MacroCluster::EU, {100.0, 50.0});
    CHECK_THROWS_AS(static_cast<void>(t.link(MacroCluster::AP, MacroCluster::SA)), ConfigError);
    CHECK(t.link(MacroCluster::AP, MacroCluster::AP).rtt_ms == 10.0);
    CHECK_THROWS_AS(t.set(MacroCluster::US, MacroCluster::AP, {0.0, 10.0}), ConfigError);
    CHECK_THROWS_AS(t.set(MacroCluster::US, MacroCluster::AP, {10.0, -1.0}), ConfigError);
}

TEST_CASE("transit steps") {
    CHECK(transit_steps(0.0) == 0);
    CHECK(transit_steps(8.01) == 1);
    CHECK(transit_steps(900.0) == 1);
    CHECK(transit_steps(900.5) == 2);
    CHECK(transit_steps(800.15) == 1);
    CHECK_THROWS_AS(transit_steps(-1.0), DomainError);
}

TEST_CASE("macro cluster names") {
    for (auto c : {MacroCluster::US, MacroCluster::EU, MacroCluster::AP, MacroCluster::SA}) {
        CHECK(parse_macro_cluster(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_macro_cluster("MARS"), ConfigError);
}

TEST_CASE("cost matrix validation") {
    CHECK_THROWS_AS(CostMatrix({"a", "b"}, {{0.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(CostMatrix({"a", "b"}, {{0.0, 1.0}, {1.0, 0.5}}), ConfigError);
    CHECK_THROWS_AS(CostMatrix({"a", "b"}, {{0.0, -1.0}, {1.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(CostMatrix({"a", "a"}, {{0.0, 1.0}, {1.0, 0.0}}), ConfigError);
    const CostMatrix m({"a", "b"}, {{0.0, 0.03}, {0.05, 0.0}});
    CHECK(m.cost_per_gb("a", "b") == 0.03);
    CHECK(m.cost_per_gb("b", "a") == 0.05);
}

TEST_CASE("loaders") {
    TempDir dir;
    SUBCASE("shipped data") {
        const auto base = fixtures::source_dir() / "data" / "network";
        const auto m = load_cost_matrix(base / "custom_transmission_cost_matrix.csv");
        const auto map = load_region_map(base / "custom_region_map.csv");
        const auto d = load_delay_table(base / "delay_params.csv");
        CHECK(m.regions().size() == 5);
        CHECK(map.size() == 5);
        CHECK(m.cost_per_gb("us-west-1", "eu-central-1") == 0.02);
        CHECK(map.at("DE-LU").macro_cluster == MacroCluster::EU);
        CHECK(d.link(MacroCluster::EU, MacroCluster::US).throughput_mbps == 400.0);
        CHECK_NOTHROW(check_coverage(map, m, {"US-CAL-CISO", "DE-LU", "SG"}));
    }
    SUBCASE("cost matrix row names must match the header") {
        write(dir.path() / "m.csv", "region,a,b\nb,0,1\na,1,0\n");
        CHECK_THROWS_AS(load_cost_matrix(dir.path() / "m.csv"), ConfigError);
    }
    SUBCASE("cost matrix with a bad cell") {
        write(dir.path() / "m.csv", "region,a,b\na,0,x\nb,1,0\n");
        CHECK_THROWS_AS(load_cost_matrix(dir.path() / "m.csv"), ConfigError);
    }
    SUBCASE("delay table columns") {
        write(dir.path() / "d.csv", "from,to,tp,rtt\nUS,EU,1,1\n");
        CHECK_THROWS_AS(load_delay_table(dir.path() / "d.csv"), ConfigError);
    }
    SUBCASE("region map with unknown cluster") {
        write(dir.path() / "r.csv", "location_code,cloud_region,macro_cluster\nX,r1,ZZ\n");
        CHECK_THROWS_AS(load_region_map(dir.path() / "r.csv"), ConfigError);
    }
    SUBCASE("duplicate location") {
        write(dir.path() / "r.csv", "location_code,cloud_region,macro_cluster\nX,r1,US\nX,r2,EU\n");
        CHECK_THROWS_AS(load_region_map(dir.path() / "r.csv"), ConfigError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_cost_matrix(dir.path() / "none.csv"), ConfigError); }
}

TEST_CASE("coverage") {
    const auto net = fixtures::test_network();
    CHECK_NOTHROW(check_coverage(net->regions, net->costs, {"L1", "L2", "L3"}));
    CHECK_THROWS_AS(check_coverage(net->regions, net->costs, {"L1", "L6"}), ConfigError);
    RegionMap map;
    map.add("X", RegionInfo{"r9", MacroCluster::US});
    CHECK_THROWS_AS(check_coverage(map, net->costs, {"X"}), ConfigError);
}
