#include "anobench/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "anobench/errors.hpp"

namespace anobench {

namespace {

constexpr int64_t kSecondsPerHour = 3600;
constexpr int64_t kSecondsPerMinute = 60;

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

constexpr std::array<int, 12> kDaysInMonth = {31, 28, 31, 30, 31, 30,
                                              31, 31, 30, 31, 30, 31};

int days_in_month(int year, int month) {
    if (month == 2 && is_leap(year)) return 29;
    return kDaysInMonth[static_cast<size_t>(month - 1)];
}

// Days since 1970-01-01 for a civil date. Valid for the full int range;
// algorithm from Howard Hinnant's civil-days notes.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const int64_t yoe = y - era * 400;
    const int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const int64_t doe = z - era * 146097;
    const int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int64_t mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
}

int parse_fixed_int(std::string_view text, size_t pos, size_t len,
                    std::string_view what, std::string_view original) {
    if (pos + len > text.size()) {
        throw DataError("timestamp too short, expected " + std::string(what) +
                        ": '" + std::string(original) + "'");
    }
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc() || ptr != first + len) {
        throw DataError("bad " + std::string(what) + " in timestamp '" +
                        std::string(original) + "'");
    }
    return value;
}

}  // namespace

int64_t floor_to_interval(int64_t epoch_seconds, int64_t interval_seconds) {
    if (interval_seconds <= 0) {
        throw ConfigError("interval_seconds must be positive, got " +
                          std::to_string(interval_seconds));
    }
    int64_t q = epoch_seconds / interval_seconds;
    if (epoch_seconds % interval_seconds != 0 && epoch_seconds < 0) --q;
    return q * interval_seconds;
}

int64_t seconds_into_day(int64_t epoch_seconds) {
    int64_t r = epoch_seconds % kSecondsPerDay;
    if (r < 0) r += kSecondsPerDay;
    return r;
}

int64_t seconds_into_week(int64_t epoch_seconds) {
    // Weeks anchored on Monday 00:00 UTC; 1970-01-01 was a Thursday,
    // so shift by three days before folding.
    int64_t shifted = epoch_seconds + 3 * kSecondsPerDay;
    int64_t r = shifted % kSecondsPerWeek;
    if (r < 0) r += kSecondsPerWeek;
    return r;
}

OffsetDateTime parse_iso8601(std::string_view text) {
    const std::string_view original = text;
    // Minimal form: "YYYY-MM-DD hh:mm:ss" plus offset; 'T' separator accepted.
    if (text.size() < 19) {
        throw DataError("timestamp too short: '" + std::string(original) + "'");
    }
    int year = parse_fixed_int(text, 0, 4, "year", original);
    int month = parse_fixed_int(text, 5, 2, "month", original);
    int day = parse_fixed_int(text, 8, 2, "day", original);
    int hour = parse_fixed_int(text, 11, 2, "hour", original);
    int minute = parse_fixed_int(text, 14, 2, "minute", original);
    int second = parse_fixed_int(text, 17, 2, "second", original);
    if (text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
        text[13] != ':' || text[16] != ':') {
        throw DataError("malformed timestamp '" + std::string(original) + "'");
    }
    if (month < 1 || month > 12) {
        throw DataError("month out of range in '" + std::string(original) + "'");
    }
    if (day < 1 || day > days_in_month(year, month)) {
        throw DataError("day out of range in '" + std::string(original) + "'");
    }
    if (hour > 23 || minute > 59 || second > 60) {
        throw DataError("time out of range in '" + std::string(original) + "'");
    }
    if (second == 60) second = 59;  // fold leap seconds rather than reject

    int64_t offset = 0;
    std::string_view rest = text.substr(19);
    if (rest.empty()) {
        throw DataError("timestamp missing UTC offset: '" + std::string(original) +
                        "'");
    }
    if (rest == "Z" || rest == "z") {
        offset = 0;
    } else {
        char sign_ch = rest[0];
        if (sign_ch != '+' && sign_ch != '-') {
            throw DataError("bad UTC offset in '" + std::string(original) + "'");
        }
        int sign = sign_ch == '-' ? -1 : 1;
        std::string_view digits = rest.substr(1);
        int oh = 0, om = 0;
        if (digits.size() == 5 && digits[2] == ':') {  // +hh:mm
            oh = parse_fixed_int(digits, 0, 2, "offset hour", original);
            om = parse_fixed_int(digits, 3, 2, "offset minute", original);
        } else if (digits.size() == 4) {  // +hhmm
            oh = parse_fixed_int(digits, 0, 2, "offset hour", original);
            om = parse_fixed_int(digits, 2, 2, "offset minute", original);
        } else if (digits.size() == 2) {  // +hh
            oh = parse_fixed_int(digits, 0, 2, "offset hour", original);
        } else {
            throw DataError("bad UTC offset in '" + std::string(original) + "'");
        }
        if (oh > 18 || om > 59) {
            throw DataError("UTC offset out of range in '" + std::string(original) +
                            "'");
        }
        offset = sign * (oh * kSecondsPerHour + om * kSecondsPerMinute);
    }

    int64_t days = days_from_civil(year, month, day);
    int64_t local = days * kSecondsPerDay + hour * kSecondsPerHour +
                    minute * kSecondsPerMinute + second;
    return OffsetDateTime{local - offset, offset};
}

std::string format_iso8601(const OffsetDateTime& dt) {
    int64_t local = dt.epoch_seconds + dt.offset_seconds;
    int64_t days = local / kSecondsPerDay;
    int64_t sod = local % kSecondsPerDay;
    if (sod < 0) {
        sod += kSecondsPerDay;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    int hh = static_cast<int>(sod / kSecondsPerHour);
    int mm = static_cast<int>((sod % kSecondsPerHour) / kSecondsPerMinute);
    int ss = static_cast<int>(sod % kSecondsPerMinute);

    int64_t off = dt.offset_seconds;
    char sign = off < 0 ? '-' : '+';
    if (off < 0) off = -off;
    int oh = static_cast<int>(off / kSecondsPerHour);
    int om = static_cast<int>((off % kSecondsPerHour) / kSecondsPerMinute);

    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d%c%02d%02d", y, m,
                  d, hh, mm, ss, sign, oh, om);
    return buf;
}

std::string format_utc(int64_t epoch_seconds) {
    return format_iso8601(OffsetDateTime{epoch_seconds, 0});
}

int64_t utc_civil(int year, int month, int day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * kSecondsPerDay +
           hour * kSecondsPerHour + minute * kSecondsPerMinute + second;
}

}  // namespace anobench
