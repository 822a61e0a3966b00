#include "geodc/time.hpp"

#include <cmath>
#include <cstdio>

#include "geodc/errors.hpp"

namespace geodc {

namespace {

bool read_int(std::string_view s, std::size_t& pos, std::size_t width, int& out) {
    if (pos + width > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += width;
    out = v;
    return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
    if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

[[noreturn]] void bad(std::string_view text) {
    throw DataError("unparsable timestamp '" + std::string(text) + "'");
}

}  // namespace

Instant make_instant(int year, unsigned month, unsigned day, int hour, int minute) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) throw DataError("invalid calendar date");
    return Instant{sys_days{ymd}} + hours{hour} + minutes{minute};
}

Instant parse_iso8601(std::string_view text) {
    std::size_t p = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, p, 4, y) || !expect(text, p, '-') || !read_int(text, p, 2, mo) ||
        !expect(text, p, '-') || !read_int(text, p, 2, d)) {
        bad(text);
    }
    if (p < text.size()) {
        if (!expect(text, p, 'T') && !expect(text, p, ' ')) bad(text);
        if (!read_int(text, p, 2, h) || !expect(text, p, ':') || !read_int(text, p, 2, mi)) bad(text);
        if (expect(text, p, ':') && !read_int(text, p, 2, s)) bad(text);
        // Fractional seconds are accepted only when zero.
        if (expect(text, p, '.')) {
            while (p < text.size() && text[p] >= '0' && text[p] <= '9') {
                if (text[p] != '0') bad(text);
                ++p;
            }
        }
        const std::string_view tz = text.substr(p);
        if (!(tz.empty() || tz == "Z" || tz == "+00:00" || tz == "+0000" || tz == "-00:00")) {
            throw DataError("timestamp '" + std::string(text) + "' is not UTC");
        }
    }
    if (h > 23 || mi > 59 || s > 59) bad(text);
    try {
        return make_instant(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi) +
               std::chrono::seconds{s};
    } catch (const DataError&) {
        bad(text);
    }
}

std::string format_iso8601(Instant t) {
    using namespace std::chrono;
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{t - dp};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

int day_of_year(Instant t) {
    using namespace std::chrono;
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    return static_cast<int>((dp - sys_days{ymd.year() / January / 1}).count()) + 1;
}

int hour_of_day(Instant t) {
    using namespace std::chrono;
    const auto dp = floor<days>(t);
    return static_cast<int>(duration_cast<hours>(t - dp).count());
}

int minute_of_hour(Instant t) {
    using namespace std::chrono;
    const auto dp = floor<hours>(t);
    return static_cast<int>(duration_cast<minutes>(t - dp).count());
}

Seconds minutes_to_seconds(double minutes) { return Seconds{std::llround(minutes * 60.0)}; }

}  // namespace geodc
