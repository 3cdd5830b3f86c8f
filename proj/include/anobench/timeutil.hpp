#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace anobench {

inline constexpr int64_t kDefaultIntervalSeconds = 300;
inline constexpr int64_t kSecondsPerDay = 86400;
inline constexpr int64_t kSecondsPerWeek = 604800;

// Start of the interval containing ts (half-open [t, t+interval) buckets,
// aligned to the epoch and therefore to astronomical time).
int64_t floor_to_interval(int64_t timestamp, int64_t interval_seconds = kDefaultIntervalSeconds);

// A wall-clock timestamp as found in the CSV files: an instant plus the UTC
// offset it was written with. The offset is kept so a parsed timestamp
// re-serializes to the identical string; comparisons use the instant only.
struct OffsetDateTime {
    int64_t epoch_seconds = 0;  // UTC instant
    int32_t offset_seconds = 0;

    bool operator==(const OffsetDateTime& o) const = default;
};

inline OffsetDateTime utc_time(int64_t epoch_seconds) { return {epoch_seconds, 0}; }

// Accepts "YYYY-MM-DD HH:MM:SS" with a numeric offset (+hhmm, +hh:mm or Z)
// and either ' ' or 'T' between date and time. Throws DataError otherwise.
OffsetDateTime parse_iso8601(std::string_view text);

// Renders in the same shape the source files use: "2024-02-02 10:22:00-0500".
std::string format_iso8601(const OffsetDateTime& t);

// Renders with a zero offset ("...+0000"); convenience for logs and reports.
std::string format_utc(int64_t epoch_seconds);

// Epoch seconds for a civil UTC date-time. No validation beyond arithmetic;
// intended for configs and tests, not for parsing user input.
int64_t utc_civil(int year, int month, int day, int hour = 0, int minute = 0,
                  int second = 0);

// Seconds since midnight UTC / since Monday 00:00 UTC.
int64_t seconds_into_day(int64_t epoch_seconds);
int64_t seconds_into_week(int64_t epoch_seconds);

}  // namespace anobench
