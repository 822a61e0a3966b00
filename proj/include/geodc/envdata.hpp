#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geodc/time.hpp"

namespace geodc::envdata {

enum class SeriesKind { Price, CarbonIntensity, DryBulbTempC, RelHumidityPct };

std::string_view to_string(SeriesKind kind);

/// Uniformly spaced, validated exogenous series.
///
/// Units by kind: Price USD/MWh (may be negative), CarbonIntensity
/// gCO2eq/kWh (>= 0), DryBulbTempC degrees C, RelHumidityPct percent in
/// [0, 100]. Immutable after construction.
class TimeSeries {
public:
    TimeSeries(std::string location, SeriesKind kind, Instant start, Seconds step, std::vector<double> values);

    [[nodiscard]] const std::string& location() const { return location_; }
    [[nodiscard]] SeriesKind kind() const { return kind_; }
    [[nodiscard]] Instant first_time() const { return start_; }
    [[nodiscard]] Instant last_time() const;
    [[nodiscard]] Seconds step() const { return step_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] Instant time_at(std::size_t i) const;

    /// Linear interpolation between the bracketing native points; exact at
    /// native points. Throws RangeError outside [first_time, last_time].
    [[nodiscard]] double value_at(Instant t) const;

    /// True when every 15-minute step start in `window` can be evaluated.
    [[nodiscard]] bool covers(const TimeWindow& window) const;

    bool operator==(const TimeSeries&) const = default;

private:
    std::string location_;
    SeriesKind kind_;
    Instant start_;
    Seconds step_;
    std::vector<double> values_;
};

/// Longest run of missing native points that loaders forward-fill.
inline constexpr int kMaxFilledGap = 3;

inline constexpr std::string_view kTimeColumn = "Datetime (UTC)";
inline constexpr std::string_view kPriceColumn = "Price (USD/MWh)";
inline constexpr std::string_view kCarbonColumn = "Carbon Intensity gCO2eq/kWh (direct)";

TimeSeries load_price_csv(const std::filesystem::path& path, const std::string& location);
TimeSeries load_carbon_csv(const std::filesystem::path& path, const std::string& location);

struct WeatherSeries {
    TimeSeries drybulb;
    TimeSeries relhumidity;
};

/// Humidity used when `hourly.relative_humidity_2m` is absent.
inline constexpr double kDefaultRelHumidityPct = 50.0;

WeatherSeries load_weather_json(const std::filesystem::path& path, const std::string& location);

/// Writes a Price or CarbonIntensity series in the loader's CSV format.
void save_series_csv(const std::filesystem::path& path, const TimeSeries& series);
void save_weather_json(const std::filesystem::path& path, const WeatherSeries& weather);

/// Builds a series from raw (time, value) points: checks ordering, forward
/// fills gaps of up to kMaxFilledGap native steps, rejects longer ones.
TimeSeries normalize_points(const std::string& location, SeriesKind kind, Seconds native_step,
                            const std::vector<Instant>& times, const std::vector<double>& values);

/// Wet-bulb temperature (C) from dry-bulb (C) and relative humidity (%),
/// from the sea-level psychrometer equation. Equals the dry bulb at
/// saturation and is nondecreasing in humidity.
double wet_bulb(double t_drybulb_c, double rel_humidity_pct);

/// Hourly series over `window`: base + amplitude * sin(2 pi h / 24) plus
/// seeded Gaussian noise. Bit-identical for a given seed.
TimeSeries synth_series(SeriesKind kind, double base, double daily_amplitude, double noise_sd,
                        const TimeWindow& window, std::uint64_t seed, std::string location = "synthetic");

}  // namespace geodc::envdata
