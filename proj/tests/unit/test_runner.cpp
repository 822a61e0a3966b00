#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geodc/config.hpp"
#include "geodc/csv.hpp"
#include "geodc/errors.hpp"
#include "geodc/runner.hpp"
#include "scenario.hpp"
#include "temp_dir.hpp"

using namespace geodc;
using namespace geodc::runner;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<double> column(const CsvTable& t, const std::string& name) {
    const auto c = t.column(name);
    REQUIRE(c.has_value());
    std::vector<double> out;
    for (const auto& row : t.rows) out.push_back(parse_double(row.at(*c), name));
    return out;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("sim config validation") {
    TempDir dir;
    const auto p = dir.path() / "sim.yaml";
    const auto load = [&](const std::string& body) {
        write(p, "simulation:\n" + body);
        auto s = config::load_sim_config(p);
        config::validate(s);
        return s;
    };
    SUBCASE("defaults and relative paths") {
        const auto s = load("  duration_days: 3\n  workload_path: w/trace.jsonl\n");
        CHECK(s.duration_days == 3);
        CHECK(s.workload_path == dir.path() / "w" / "trace.jsonl");
        CHECK(s.network_dir == dir.path() / "network");
        CHECK(s.start() == make_instant(2023, 7, 1));
        CHECK(s.window().end == make_instant(2023, 7, 4));
    }
    SUBCASE("timestep") { CHECK_THROWS_AS(load("  timestep_minutes: 30\n"), ConfigError); }
    SUBCASE("days") { CHECK_THROWS_AS(load("  duration_days: 0\n"), ConfigError); }
    SUBCASE("month") { CHECK_THROWS_AS(load("  month: 13\n"), ConfigError); }
    SUBCASE("calendar date") { CHECK_THROWS_AS(load("  month: 2\n  init_day: 30\n"), ConfigError); }
    SUBCASE("strategy") { CHECK_THROWS_AS(load("  strategy: clairvoyant\n"), ConfigError); }
    SUBCASE("manual strategy is allowed") { CHECK_NOTHROW(load("  strategy: manual_rl\n")); }
    SUBCASE("defer flag needs single action mode") {
        CHECK_THROWS_AS(load("  disable_defer_action: true\n"), ConfigError);
        CHECK_NOTHROW(load("  single_action_mode: true\n  disable_defer_action: true\n"));
    }
    SUBCASE("wrong type") { CHECK_THROWS_AS(load("  duration_days: many\n"), ConfigError); }
    SUBCASE("bad range") {
        CHECK_THROWS_AS(load("  synthetic_workload:\n    cores: [1, 2, 3]\n"), ConfigError);
    }
    SUBCASE("no root") {
        write(p, "sim: {}\n");
        CHECK_THROWS_AS(config::load_sim_config(p), ConfigError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(config::load_sim_config(dir.path() / "none.yaml"), ConfigError); }
}

TEST_CASE("datacenter config validation") {
    TempDir dir;
    const auto p = dir.path() / "dcs.yaml";
    const std::string good = "  - dc_id: 1\n    location: SG\n    total_cores: 10\n    dc_config_file: dc.json\n";
    SUBCASE("parsed") {
        write(p, "datacenters:\n" + good +
                     "    hru_enabled: true\n    hvac: {controller: deadband, lo: 23, hi: 25}\n"
                     "    data:\n      price: {file: p.csv}\n");
        const auto d = config::load_datacenters(p);
        REQUIRE(d.size() == 1);
        CHECK(d[0].dc_config_file == dir.path() / "dc.json");
        CHECK(d[0].price.file == dir.path() / "p.csv");
        CHECK(d[0].hvac.mode == config::HvacMode::Deadband);
        CHECK(d[0].hvac.deadband_lo == 23.0);
        CHECK(d[0].hru_enabled);
    }
    SUBCASE("duplicate id") {
        write(p, "datacenters:\n" + good + good);
        CHECK_THROWS_AS(config::load_datacenters(p), ConfigError);
    }
    SUBCASE("missing location") {
        write(p, "datacenters:\n  - dc_id: 1\n    total_cores: 10\n");
        CHECK_THROWS_AS(config::load_datacenters(p), ConfigError);
    }
    SUBCASE("bad weight") {
        write(p, "datacenters:\n" + good + "    population_weight: 0\n");
        CHECK_THROWS_AS(config::load_datacenters(p), ConfigError);
    }
    SUBCASE("unknown hvac controller") {
        write(p, "datacenters:\n" + good + "    hvac: {controller: pid}\n");
        CHECK_THROWS_AS(config::load_datacenters(p), ConfigError);
    }
    SUBCASE("empty list") {
        write(p, "datacenters: []\n");
        CHECK_THROWS_AS(config::load_datacenters(p), ConfigError);
    }
}

TEST_CASE("repository configs load and run") {
    const fs::path src = GEODC_SOURCE_DIR;
    auto c = config::load_configs(src / "configs" / "sim_config.yaml", src / "configs" / "datacenters.yaml",
                                  src / "configs" / "reward_config.yaml");
    c.sim.duration_days = 1;
    CHECK(c.datacenters.size() == 3);
    const auto ep = run_episode(c, 7);
    CHECK(ep.steps.size() == 96);
    CHECK(ep.strategy == "lowest_carbon");
    CHECK(ep.kpis[8] == 0.0);
}

TEST_CASE("step log layout") {
    const auto cols = step_log_columns({4, 9});
    CHECK(cols.size() == 18 + 2 * 19);
    CHECK(cols.front() == "step");
    CHECK(cols[18] == "dc4_energy_kwh");
    CHECK(cols.back() == "dc9_ci_g_per_kwh");

    TempDir dir;
    const auto c = scenario::load(dir.path(), {.days = 1});
    const auto ep = run_episode(c, 1);
    const std::string log = format_step_log(ep.steps);
    CHECK(log.rfind(std::string(kStepLogSchema) + "\n", 0) == 0);
    std::istringstream lines(log);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) ++n;
    CHECK(n == 2 + 96);
}

TEST_CASE("KPIs equal the column sums of the written log") {
    TempDir dir;
    auto c = scenario::load(dir.path(), {.days = 1, .strategy = "round_robin"});
    const auto out = dir.path() / "out";
    const auto sweep = run_sweep(c, {5}, out);
    const auto& kpis = sweep.episodes.at(0).kpis;
    const auto t = read_csv(out / "steps_seed5.csv");
    REQUIRE(t.rows.size() == 96);

    CHECK(sum(column(t, "total_energy_cost_usd")) == kpis[0]);
    CHECK(sum(column(t, "total_co2_kg")) / 1000.0 == kpis[1]);
    CHECK(sum(column(t, "total_energy_kwh")) / 1000.0 == kpis[2]);
    CHECK(sum(column(t, "total_water_l")) / 1000.0 == kpis[3]);
    const double met = sum(column(t, "sla_met"));
    const double violated = sum(column(t, "sla_violated"));
    CHECK((met + violated > 0.0 ? violated / (met + violated) * 100.0 : 0.0) == kpis[4]);
    CHECK(sum(column(t, "avg_cpu_util_pct")) / 96.0 == kpis[5]);
    CHECK(sum(column(t, "avg_gpu_util_pct")) / 96.0 == kpis[6]);
    CHECK(sum(column(t, "transmission_cost_usd")) == kpis[7]);
    CHECK(sum(column(t, "tasks_deferred")) == kpis[8]);
    CHECK(kpis[7] > 0.0);

    // The log round-trips: KPI JSON carries the same numbers.
    const auto j = nlohmann::json::parse(slurp(out / "kpi_seed5.json"));
    CHECK(j.at("steps") == 96);
    CHECK(j.at("strategy") == "round_robin");
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        CHECK(j.at("kpis").at(std::string(kKpiNames[k])).get<double>() == kpis[k]);
    }
}

TEST_CASE("same seed gives byte-identical logs") {
    TempDir dir;
    const auto c = scenario::load(dir.path(), {.days = 1, .strategy = "lowest_price"});
    run_sweep(c, {3}, dir.path() / "a");
    run_sweep(c, {3}, dir.path() / "b");
    CHECK(slurp(dir.path() / "a" / "steps_seed3.csv") == slurp(dir.path() / "b" / "steps_seed3.csv"));
    CHECK(slurp(dir.path() / "a" / "summary.json") == slurp(dir.path() / "b" / "summary.json"));
    run_sweep(c, {4}, dir.path() / "c");
    CHECK(slurp(dir.path() / "a" / "steps_seed3.csv") != slurp(dir.path() / "c" / "steps_seed4.csv"));
}

TEST_CASE("local only never pays for transfers") {
    TempDir dir;
    const auto c = scenario::load(dir.path(), {.days = 1, .strategy = "local_only"});
    const auto ep = run_episode(c, 2);
    for (const auto& s : ep.steps) {
        CHECK(s.info.transmission_cost_total_usd == 0.0);
        CHECK(s.info.remote_assignments == 0);
    }
    CHECK(ep.kpis[7] == 0.0);
}

TEST_CASE("summary aggregation") {
    SUBCASE("one row has zero spread") {
        KpiRow r{1, 2, 3, 4, 5, 6, 7, 8, 9};
        const auto s = summarize({r});
        for (std::size_t k = 0; k < 9; ++k) {
            CHECK(s[k].mean == r[k]);
            CHECK(s[k].std == 0.0);
            CHECK(s[k].n == 1);
        }
    }
    SUBCASE("identical rows have zero spread") {
        KpiRow r{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        for (const auto& s : summarize({r, r, r})) CHECK(s.std == 0.0);
    }
    SUBCASE("two rows") {
        KpiRow a{1, 0, 0, 0, 0, 0, 0, 0, 2};
        KpiRow b{3, 0, 0, 0, 0, 0, 0, 0, 6};
        const auto s = summarize({a, b});
        CHECK(s[0].mean == 2.0);
        CHECK(s[0].std == 1.0);
        CHECK(s[8].mean == 4.0);
        CHECK(s[8].std == 2.0);
    }
    SUBCASE("empty") { CHECK_THROWS_AS(summarize({}), ConfigError); }
}

TEST_CASE("sweep summary files") {
    TempDir dir;
    const auto c = scenario::load(dir.path(), {.days = 1, .strategy = "most_available"});
    const auto out = dir.path() / "out";
    const auto sweep = run_sweep(c, {1, 2}, out);
    REQUIRE(sweep.episodes.size() == 2);
    for (std::size_t k = 0; k < 9; ++k) {
        const double a = sweep.episodes[0].kpis[k];
        const double b = sweep.episodes[1].kpis[k];
        CHECK(sweep.summary[k].mean == (a + b) / 2.0);
    }
    const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(j.at("strategy") == "most_available");
    CHECK(j.at("seeds") == nlohmann::json::array({1, 2}));
    CHECK(j.at("kpis").at("total_cost_usd").at("n") == 2);
    const auto csv = read_csv(out / "summary.csv");
    CHECK(csv.header == std::vector<std::string>{"kpi", "mean", "std", "n"});
    REQUIRE(csv.rows.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(csv.rows[k][0] == kKpiNames[k]);
        CHECK(parse_double(csv.rows[k][1], "mean") == sweep.summary[k].mean);
        CHECK(parse_double(csv.rows[k][2], "std") == sweep.summary[k].std);
    }
    CHECK_THROWS_AS(run_sweep(c, {}), ConfigError);
}

TEST_CASE("data coverage failures surface before the first step") {
    TempDir dir;
    auto c = scenario::load(dir.path(), {.days = 1});
    write(dir.path() / "price.csv", "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50\n2023-07-01T01:00:00Z,55\n");
    c.datacenters[0].price.file = dir.path() / "price.csv";
    CHECK_THROWS_AS(run_episode(c, 0), ConfigError);
}
