#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace geodc {

/// A UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr Seconds kStep{15 * 60};
inline constexpr Seconds kHour{3600};
inline constexpr int kStepsPerDay = 96;

/// Half-open window [start, end).
struct TimeWindow {
    Instant start;
    Instant end;

    [[nodiscard]] Seconds length() const { return end - start; }
    [[nodiscard]] bool contains(Instant t) const { return t >= start && t < end; }
};

/// Accepts `YYYY-MM-DD[T| ]HH:MM[:SS][Z|+00:00]`. Only UTC offsets of zero
/// are accepted; anything else throws DataError.
Instant parse_iso8601(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Instant t);

Instant make_instant(int year, unsigned month, unsigned day, int hour = 0, int minute = 0);

/// 1-based day of year.
int day_of_year(Instant t);
int hour_of_day(Instant t);
int minute_of_hour(Instant t);

inline bool is_step_aligned(Instant t) { return t.time_since_epoch().count() % kStep.count() == 0; }

inline double minutes_between(Instant from, Instant to) {
    return static_cast<double>((to - from).count()) / 60.0;
}

/// Seconds rounded to nearest from a real minute count.
Seconds minutes_to_seconds(double minutes);

}  // namespace geodc
