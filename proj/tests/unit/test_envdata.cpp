#include <doctest.h>

#include <cmath>
#include <fstream>

#include "geodc/envdata.hpp"
#include "geodc/errors.hpp"
#include "temp_dir.hpp"

using namespace geodc;
using namespace geodc::envdata;

namespace {

Instant at(int hour, int minute = 0) { return make_instant(2023, 7, 1, hour, minute); }

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

// Stull's empirical fit, valid for RH 5..99 % and T -20..50 C. Used only
// as an independent cross-check.
double stull(double t, double rh) {
    return t * std::atan(0.151977 * std::sqrt(rh + 8.313659)) + std::atan(t + rh) - std::atan(rh - 1.676331) +
           0.00391838 * std::pow(rh, 1.5) * std::atan(0.023101 * rh) - 4.686035;
}

// Sea-level psychrometric chart readings (dry bulb C, RH %, wet bulb C).
struct ChartPoint {
    double t;
    double rh;
    double wb;
};
constexpr ChartPoint kChart[] = {
    {20.0, 50.0, 13.7}, {30.0, 50.0, 22.2}, {25.0, 60.0, 19.5}, {35.0, 40.0, 24.0}, {10.0, 80.0, 8.2}, {40.0, 20.0, 22.0},
};

}  // namespace

TEST_CASE("price csv ingests rows as written") {
    TempDir dir;
    const auto p = dir.path() / "price.csv";
    write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50.0\n2023-07-01T01:00:00Z,70.0\n");
    const auto s = load_price_csv(p, "US-CAL-CISO");
    CHECK(s.size() == 2);
    CHECK(s.values() == std::vector<double>{50.0, 70.0});
    CHECK(s.kind() == SeriesKind::Price);
    CHECK(s.location() == "US-CAL-CISO");
    CHECK(s.step() == kHour);
}

TEST_CASE("price csv interpolation") {
    TempDir dir;
    const auto p = dir.path() / "price.csv";
    write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50.0\n2023-07-01T01:00:00Z,70.0\n");
    const auto s = load_price_csv(p, "X");
    CHECK(s.value_at(at(0, 15)) == doctest::Approx(55.0).epsilon(1e-15));
    CHECK(s.value_at(at(0)) == 50.0);
    CHECK(s.value_at(at(1)) == 70.0);
    CHECK_THROWS_AS((void)s.value_at(at(1) + Seconds{1}), RangeError);
    CHECK_THROWS_AS((void)s.value_at(at(0) - Seconds{1}), RangeError);
}

TEST_CASE("price csv rejects bad files") {
    TempDir dir;
    const auto p = dir.path() / "bad.csv";

    SUBCASE("missing column") {
        write(p, "Datetime (UTC),Cost\n2023-07-01T00:00:00Z,50.0\n");
        CHECK_THROWS_AS(load_price_csv(p, "X"), FormatError);
    }
    SUBCASE("duplicate timestamp names the duplicate") {
        write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50\n2023-07-01T00:00:00Z,51\n");
        try {
            load_price_csv(p, "X");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("2023-07-01T00:00:00Z") != std::string::npos);
        }
    }
    SUBCASE("non-monotone") {
        write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T01:00:00Z,50\n2023-07-01T00:00:00Z,51\n");
        CHECK_THROWS_AS(load_price_csv(p, "X"), DataError);
    }
    SUBCASE("unparsable row") {
        write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,abc\n");
        CHECK_THROWS_AS(load_price_csv(p, "X"), DataError);
    }
    SUBCASE("gap longer than the fill limit") {
        write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50\n2023-07-01T05:00:00Z,51\n");
        CHECK_THROWS_AS(load_price_csv(p, "X"), DataError);
    }
}

TEST_CASE("single missing hour is forward filled") {
    TempDir dir;
    const auto p = dir.path() / "gap.csv";
    write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50\n2023-07-01T02:00:00Z,80\n");
    const auto s = load_price_csv(p, "X");
    CHECK(s.values() == std::vector<double>{50.0, 50.0, 80.0});
}

TEST_CASE("gaps of exactly the fill limit are accepted") {
    TempDir dir;
    const auto p = dir.path() / "gap3.csv";
    write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,50\n2023-07-01T04:00:00Z,80\n");
    const auto s = load_price_csv(p, "X");
    CHECK(s.values() == std::vector<double>{50.0, 50.0, 50.0, 50.0, 80.0});
}

TEST_CASE("carbon csv") {
    TempDir dir;
    const auto p = dir.path() / "ci.csv";
    SUBCASE("constant") {
        write(p, "Datetime (UTC),Carbon Intensity gCO2eq/kWh (direct)\n2023-07-01T00:00:00Z,100\n"
                 "2023-07-01T01:00:00Z,100\n2023-07-01T02:00:00Z,100\n");
        const auto s = load_carbon_csv(p, "X");
        for (double v : s.values()) CHECK(v == 100.0);
        CHECK(s.value_at(at(1, 45)) == 100.0);
    }
    SUBCASE("negative rejected") {
        write(p, "Datetime (UTC),Carbon Intensity gCO2eq/kWh (direct)\n2023-07-01T00:00:00Z,-1\n");
        CHECK_THROWS_AS(load_carbon_csv(p, "X"), DataError);
    }
    SUBCASE("one year of hourly rows") {
        std::string text = "Datetime (UTC),Carbon Intensity gCO2eq/kWh (direct)\n";
        const Instant start = make_instant(2023, 1, 1);
        for (int h = 0; h < 8760; ++h) {
            text += format_iso8601(start + h * kHour) + "," + std::to_string(200 + h % 24) + "\n";
        }
        write(p, text);
        CHECK(load_carbon_csv(p, "X").size() == 8760);
    }
}

TEST_CASE("negative prices are valid") {
    TempDir dir;
    const auto p = dir.path() / "neg.csv";
    write(p, "Datetime (UTC),Price (USD/MWh)\n2023-07-01T00:00:00Z,-12.5\n");
    CHECK(load_price_csv(p, "X").values().front() == -12.5);
}

TEST_CASE("weather json") {
    TempDir dir;
    const auto p = dir.path() / "w.json";
    SUBCASE("24 aligned entries") {
        std::string times;
        std::string temps;
        std::string hums;
        for (int h = 0; h < 24; ++h) {
            if (h) {
                times += ",";
                temps += ",";
                hums += ",";
            }
            times += "\"" + format_iso8601(at(h)) + "\"";
            temps += std::to_string(15 + h);
            hums += std::to_string(40 + h);
        }
        write(p, "{\"hourly\":{\"time\":[" + times + "],\"temperature_2m\":[" + temps +
                     "],\"relative_humidity_2m\":[" + hums + "]}}");
        const auto w = load_weather_json(p, "X");
        CHECK(w.drybulb.size() == 24);
        CHECK(w.relhumidity.size() == 24);
        CHECK(w.drybulb.values()[3] == 18.0);
        CHECK(w.relhumidity.values()[3] == 43.0);
    }
    SUBCASE("missing humidity defaults to 50") {
        write(p, R"({"hourly":{"time":["2023-07-01T00:00","2023-07-01T01:00"],"temperature_2m":[20,21]}})");
        const auto w = load_weather_json(p, "X");
        CHECK(w.relhumidity.values() == std::vector<double>{50.0, 50.0});
    }
    SUBCASE("length mismatch") {
        write(p, R"({"hourly":{"time":["2023-07-01T00:00"],"temperature_2m":[20,21]}})");
        CHECK_THROWS_AS(load_weather_json(p, "X"), FormatError);
    }
}

TEST_CASE("series round trip through files") {
    TempDir dir;
    const TimeWindow w{at(0), at(0) + std::chrono::days(2)};
    const auto price = synth_series(SeriesKind::Price, 60.0, 20.0, 5.0, w, 11, "X");
    save_series_csv(dir.path() / "p.csv", price);
    CHECK(load_price_csv(dir.path() / "p.csv", "X") == price);

    const auto ci = synth_series(SeriesKind::CarbonIntensity, 300.0, 40.0, 5.0, w, 12, "X");
    save_series_csv(dir.path() / "c.csv", ci);
    CHECK(load_carbon_csv(dir.path() / "c.csv", "X") == ci);

    WeatherSeries weather{synth_series(SeriesKind::DryBulbTempC, 20.0, 5.0, 1.0, w, 13, "X"),
                          synth_series(SeriesKind::RelHumidityPct, 50.0, 10.0, 2.0, w, 14, "X")};
    save_weather_json(dir.path() / "w.json", weather);
    const auto back = load_weather_json(dir.path() / "w.json", "X");
    CHECK(back.drybulb == weather.drybulb);
    CHECK(back.relhumidity == weather.relhumidity);
}

TEST_CASE("value_at stays between neighbours") {
    const TimeWindow w{at(0), at(0) + std::chrono::days(3)};
    const auto s = synth_series(SeriesKind::Price, 60.0, 25.0, 8.0, w, 5, "X");
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double a = s.values()[i];
        const double b = s.values()[i + 1];
        for (int m = 0; m <= 60; m += 5) {
            const double v = s.value_at(s.time_at(i) + Seconds{60 * m});
            CHECK(v >= std::min(a, b) - 1e-12);
            CHECK(v <= std::max(a, b) + 1e-12);
        }
    }
}

TEST_CASE("coverage check") {
    const TimeWindow day{at(0), at(0) + std::chrono::days(1)};
    const auto s = synth_series(SeriesKind::Price, 60.0, 0.0, 0.0, day, 1, "X");
    CHECK(s.covers(day));
    const TimeWindow longer{at(0), at(0) + std::chrono::days(2)};
    CHECK_FALSE(s.covers(longer));
    const TimeWindow earlier{at(0) - kHour, at(0) + std::chrono::hours(2)};
    CHECK_FALSE(s.covers(earlier));
}

TEST_CASE("wet bulb") {
    CHECK(std::abs(wet_bulb(20.0, 100.0) - 20.0) <= 0.5);
    CHECK(wet_bulb(20.0, 100.0) == doctest::Approx(20.0).epsilon(1e-9));

    const double mid = wet_bulb(20.0, 50.0);
    CHECK(mid > 10.0);
    CHECK(mid < 20.0);
    CHECK(std::abs(mid - 13.7) <= 1.0);

    CHECK(wet_bulb(30.0, 0.01) < 15.0);

    CHECK_THROWS_AS(wet_bulb(20.0, -1.0), DomainError);
    CHECK_THROWS_AS(wet_bulb(20.0, 101.0), DomainError);
}

TEST_CASE("wet bulb matches chart readings") {
    for (const auto& p : kChart) {
        CAPTURE(p.t);
        CAPTURE(p.rh);
        CHECK(std::abs(wet_bulb(p.t, p.rh) - p.wb) <= 0.3);
    }
}

TEST_CASE("wet bulb agrees with the empirical fit inside its valid range") {
    for (double t = 5.0; t <= 40.0; t += 5.0) {
        for (double rh = 20.0; rh <= 95.0; rh += 5.0) {
            CAPTURE(t);
            CAPTURE(rh);
            CHECK(std::abs(wet_bulb(t, rh) - stull(t, rh)) <= 1.0);
        }
    }
}

TEST_CASE("wet bulb never exceeds dry bulb and rises with humidity") {
    for (double t = -5.0; t <= 45.0; t += 2.5) {
        double prev = -1e9;
        for (double rh = 0.0; rh <= 100.0; rh += 1.0) {
            const double wb = wet_bulb(t, rh);
            CHECK(wb <= t);
            CHECK(wb >= prev - 1e-12);
            prev = wb;
        }
    }
}

TEST_CASE("synthetic series") {
    const TimeWindow w{at(0), at(0) + std::chrono::days(2)};
    SUBCASE("flat profile is constant") {
        const auto s = synth_series(SeriesKind::Price, 42.0, 0.0, 0.0, w, 3);
        for (double v : s.values()) CHECK(v == 42.0);
    }
    SUBCASE("bit identical for a seed") {
        const auto a = synth_series(SeriesKind::Price, 60.0, 10.0, 3.0, w, 99);
        const auto b = synth_series(SeriesKind::Price, 60.0, 10.0, 3.0, w, 99);
        CHECK(a == b);
        const auto c = synth_series(SeriesKind::Price, 60.0, 10.0, 3.0, w, 100);
        CHECK_FALSE(a == c);
    }
    SUBCASE("amplitude bounds without noise") {
        const auto s = synth_series(SeriesKind::CarbonIntensity, 100.0, 10.0, 0.0, w, 3);
        for (double v : s.values()) {
            CHECK(v >= 90.0);
            CHECK(v <= 110.0);
        }
    }
    SUBCASE("covers the window it was built for") {
        const TimeWindow odd{at(0, 15), at(5, 45)};
        CHECK(synth_series(SeriesKind::Price, 1.0, 0.0, 0.0, odd, 1).covers(odd));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(synth_series(SeriesKind::Price, 60.0, -1.0, 0.0, w, 1), DomainError);
        CHECK_THROWS_AS(synth_series(SeriesKind::Price, 60.0, 1.0, -1.0, w, 1), DomainError);
        CHECK_THROWS_AS(synth_series(SeriesKind::CarbonIntensity, 10.0, 20.0, 0.0, w, 1), DomainError);
    }
}
