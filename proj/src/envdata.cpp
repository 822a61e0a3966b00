#include "geodc/envdata.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "geodc/csv.hpp"
#include "geodc/errors.hpp"
#include "geodc/rng.hpp"

namespace geodc::envdata {

std::string_view to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::Price: return "price";
        case SeriesKind::CarbonIntensity: return "carbon_intensity";
        case SeriesKind::DryBulbTempC: return "drybulb_c";
        case SeriesKind::RelHumidityPct: return "relhumidity_pct";
    }
    return "unknown";
}

namespace {

void check_value(SeriesKind kind, double v, std::size_t index) {
    if (!std::isfinite(v)) throw DataError("non-finite value at point " + std::to_string(index));
    if (kind == SeriesKind::CarbonIntensity && v < 0.0) {
        throw DataError("negative carbon intensity at point " + std::to_string(index));
    }
    if (kind == SeriesKind::RelHumidityPct && (v < 0.0 || v > 100.0)) {
        throw DataError("relative humidity outside [0,100] at point " + std::to_string(index));
    }
}

}  // namespace

TimeSeries::TimeSeries(std::string location, SeriesKind kind, Instant start, Seconds step, std::vector<double> values)
    : location_(std::move(location)), kind_(kind), start_(start), step_(step), values_(std::move(values)) {
    if (step_.count() <= 0) throw DataError("series step must be positive");
    if (values_.empty()) throw DataError("series '" + location_ + "' is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) check_value(kind_, values_[i], i);
}

Instant TimeSeries::time_at(std::size_t i) const { return start_ + step_ * static_cast<Seconds::rep>(i); }

Instant TimeSeries::last_time() const { return time_at(values_.size() - 1); }

double TimeSeries::value_at(Instant t) const {
    if (t < start_ || t > last_time()) {
        throw RangeError(std::string(to_string(kind_)) + " series for '" + location_ + "' does not cover " +
                         format_iso8601(t));
    }
    const auto offset = (t - start_).count();
    const auto idx = static_cast<std::size_t>(offset / step_.count());
    const auto rem = offset % step_.count();
    if (rem == 0) return values_[idx];
    const double w = static_cast<double>(rem) / static_cast<double>(step_.count());
    return values_[idx] + (values_[idx + 1] - values_[idx]) * w;
}

bool TimeSeries::covers(const TimeWindow& window) const {
    if (window.end <= window.start) return true;
    return start_ <= window.start && last_time() >= window.end - kStep;
}

TimeSeries normalize_points(const std::string& location, SeriesKind kind, Seconds native_step,
                            const std::vector<Instant>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw FormatError("time/value length mismatch");
    if (times.empty()) throw DataError("series '" + location + "' has no rows");
    std::vector<double> out;
    out.reserve(times.size());
    out.push_back(values[0]);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const auto delta = times[i] - times[i - 1];
        if (delta.count() == 0) {
            throw DataError("duplicate timestamp " + format_iso8601(times[i]) + " at row " + std::to_string(i + 1));
        }
        if (delta.count() < 0) {
            throw DataError("non-monotone timestamp " + format_iso8601(times[i]) + " at row " + std::to_string(i + 1));
        }
        if (delta.count() % native_step.count() != 0) {
            throw DataError("timestamp " + format_iso8601(times[i]) + " is off the native grid");
        }
        const auto missing = delta.count() / native_step.count() - 1;
        if (missing > kMaxFilledGap) {
            throw DataError("gap of " + std::to_string(missing) + " missing points before " +
                            format_iso8601(times[i]) + " exceeds the forward-fill limit");
        }
        for (long k = 0; k < missing; ++k) out.push_back(out.back());
        out.push_back(values[i]);
    }
    return TimeSeries(location, kind, times[0], native_step, std::move(out));
}

namespace {

TimeSeries load_csv_series(const std::filesystem::path& path, const std::string& location, SeriesKind kind,
                           std::string_view value_column) {
    const CsvTable table = read_csv(path);
    const auto tcol = table.column(kTimeColumn);
    const auto vcol = table.column(value_column);
    if (!tcol) throw FormatError("'" + path.string() + "' lacks column '" + std::string(kTimeColumn) + "'");
    if (!vcol) throw FormatError("'" + path.string() + "' lacks column '" + std::string(value_column) + "'");
    std::vector<Instant> times;
    std::vector<double> values;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path.filename().string() + " line " + std::to_string(table.lines[r]);
        if (row.size() <= std::max(*tcol, *vcol)) throw DataError("short row at " + where);
        try {
            times.push_back(parse_iso8601(row[*tcol]));
            values.push_back(parse_double(row[*vcol], "value"));
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (" + where + ")");
        }
        try {
            check_value(kind, values.back(), r);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (" + where + ")");
        }
    }
    return normalize_points(location, kind, kHour, times, values);
}

}  // namespace

TimeSeries load_price_csv(const std::filesystem::path& path, const std::string& location) {
    return load_csv_series(path, location, SeriesKind::Price, kPriceColumn);
}

TimeSeries load_carbon_csv(const std::filesystem::path& path, const std::string& location) {
    return load_csv_series(path, location, SeriesKind::CarbonIntensity, kCarbonColumn);
}

WeatherSeries load_weather_json(const std::filesystem::path& path, const std::string& location) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
    if (!doc.is_object() || !doc.contains("hourly") || !doc["hourly"].is_object()) {
        throw FormatError("'" + path.string() + "' lacks an 'hourly' object");
    }
    const auto& hourly = doc["hourly"];
    for (const char* key : {"time", "temperature_2m"}) {
        if (!hourly.contains(key) || !hourly[key].is_array()) {
            throw FormatError("'" + path.string() + "' lacks array hourly." + key);
        }
    }
    const auto& jt = hourly["time"];
    const auto& jtemp = hourly["temperature_2m"];
    const bool has_rh = hourly.contains("relative_humidity_2m");
    if (jt.size() != jtemp.size()) throw FormatError("hourly.time and hourly.temperature_2m lengths differ");
    if (has_rh && hourly["relative_humidity_2m"].size() != jt.size()) {
        throw FormatError("hourly.time and hourly.relative_humidity_2m lengths differ");
    }
    std::vector<Instant> times;
    std::vector<double> temps, rhs;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        if (!jt[i].is_string()) throw FormatError("hourly.time[" + std::to_string(i) + "] is not a string");
        times.push_back(parse_iso8601(jt[i].get<std::string>()));
        if (!jtemp[i].is_number()) throw DataError("hourly.temperature_2m[" + std::to_string(i) + "] is not a number");
        temps.push_back(jtemp[i].get<double>());
        if (has_rh) {
            const auto& v = hourly["relative_humidity_2m"][i];
            if (!v.is_number()) throw DataError("hourly.relative_humidity_2m[" + std::to_string(i) + "] is not a number");
            rhs.push_back(v.get<double>());
        } else {
            rhs.push_back(kDefaultRelHumidityPct);
        }
    }
    return WeatherSeries{normalize_points(location, SeriesKind::DryBulbTempC, kHour, times, temps),
                         normalize_points(location, SeriesKind::RelHumidityPct, kHour, times, rhs)};
}

void save_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::string_view column;
    switch (series.kind()) {
        case SeriesKind::Price: column = kPriceColumn; break;
        case SeriesKind::CarbonIntensity: column = kCarbonColumn; break;
        default: throw DomainError("save_series_csv handles price and carbon series only");
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << kTimeColumn << ',' << column << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_iso8601(series.time_at(i)) << ',' << format_double(series.values()[i]) << '\n';
    }
}

void save_weather_json(const std::filesystem::path& path, const WeatherSeries& weather) {
    if (weather.drybulb.size() != weather.relhumidity.size() ||
        weather.drybulb.first_time() != weather.relhumidity.first_time()) {
        throw DomainError("weather series are not aligned");
    }
    nlohmann::json times = nlohmann::json::array();
    for (std::size_t i = 0; i < weather.drybulb.size(); ++i) times.push_back(format_iso8601(weather.drybulb.time_at(i)));
    nlohmann::json doc;
    doc["hourly"]["time"] = times;
    doc["hourly"]["temperature_2m"] = weather.drybulb.values();
    doc["hourly"]["relative_humidity_2m"] = weather.relhumidity.values();
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << doc.dump(1) << '\n';
}

double wet_bulb(double t, double rh) {
    if (!(rh >= 0.0 && rh <= 100.0)) throw DomainError("relative humidity must be in [0, 100]");
    if (!std::isfinite(t)) throw DomainError("dry-bulb temperature must be finite");
    // Psychrometer equation at sea level, e_s(Tw) - gamma * P * (T - Tw) = e,
    // with Magnus saturation pressure over water (hPa). The residual is
    // increasing in Tw, so bisection on [T - 100, T] always brackets the root.
    constexpr double kGammaP = 6.62e-4 * 1013.25;
    const auto es = [](double x) { return 6.112 * std::exp(17.62 * x / (243.12 + x)); };
    const double e = rh / 100.0 * es(t);
    double lo = t - 100.0;
    double hi = t;
    for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (es(mid) - kGammaP * (t - mid) - e > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

TimeSeries synth_series(SeriesKind kind, double base, double amplitude, double noise_sd, const TimeWindow& window,
                        std::uint64_t seed, std::string location) {
    if (!(amplitude >= 0.0) || !(noise_sd >= 0.0)) throw DomainError("amplitude and noise_sd must be >= 0");
    if (!std::isfinite(base)) throw DomainError("base must be finite");
    if (kind == SeriesKind::CarbonIntensity && base - amplitude < 0.0) {
        throw DomainError("carbon intensity profile would go negative (base - amplitude < 0)");
    }
    if (kind == SeriesKind::RelHumidityPct && (base - amplitude < 0.0 || base + amplitude > 100.0)) {
        throw DomainError("humidity profile leaves [0, 100]");
    }
    if (window.end <= window.start) throw DomainError("empty synthesis window");
    using namespace std::chrono;
    const Instant first = floor<hours>(window.start);
    const Instant last = ceil<hours>(window.end);
    const auto n = static_cast<std::size_t>((last - first) / kHour) + 1;
    Rng rng(seed);
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Instant t = first + kHour * static_cast<Seconds::rep>(i);
        const double h = static_cast<double>(hour_of_day(t));
        double v = base + amplitude * std::sin(2.0 * std::numbers::pi * h / 24.0);
        if (noise_sd > 0.0) v += noise_sd * rng.normal();
        if (kind == SeriesKind::CarbonIntensity) v = std::max(v, 0.0);
        if (kind == SeriesKind::RelHumidityPct) v = std::clamp(v, 0.0, 100.0);
        values.push_back(v);
    }
    return TimeSeries(std::move(location), kind, first, kHour, std::move(values));
}

}  // namespace geodc::envdata
