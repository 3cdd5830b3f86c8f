#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace anobench {

enum class Kind : uint8_t { Client = 0, Server = 1 };

std::string_view kind_token(Kind k);
std::optional<Kind> kind_from_token(std::string_view token);

// The eight aggregate statistics, in their canonical order.
enum class StatName : uint8_t {
    Minimum = 0,
    Maximum,
    Median,
    Average,
    Count,
    StdDev,
    Skewness,
    Kurtosis,
};

inline constexpr std::array<StatName, 8> kAllStats = {
    StatName::Minimum,  StatName::Maximum, StatName::Median,   StatName::Average,
    StatName::Count,    StatName::StdDev,  StatName::Skewness, StatName::Kurtosis,
};

// Canonical column tokens: min, max, median, average, count, std, skew, kurt.
std::string_view stat_token(StatName s);

// Accepts the canonical token plus common aliases (minimum, mean, stddev,
// skewness, kurtosis, ...). Returns nullopt for unknown tokens.
std::optional<StatName> stat_from_token(std::string_view token);

// Identity of one telemetry series. Fields must not contain the column
// separator '_' (IDs in the data are obfuscated tokens like "datacenter1").
struct SeriesKey {
    std::string location;
    Kind kind = Kind::Server;
    std::string host;
    std::string method;
    int status_code = -1;  // HTTP code, or -1 for non-HTTP responses
    std::string endpoint;

    auto operator<=>(const SeriesKey&) const = default;

    // Throws GrammarError when a field is empty, contains '_', or the
    // status code is outside {-1} U [100, 599].
    void validate() const;

    bool is_5xx() const { return status_code >= 500 && status_code <= 599; }
};

SeriesKey make_series_key(std::string location, Kind kind, std::string host,
                          std::string method, int status_code, std::string endpoint);

struct ColumnName {
    SeriesKey key;
    StatName stat = StatName::Count;
    std::string rendered;
};

// {location}_{kind}_{host}_{method}_{statusCode}_{endpoint}_{stat}
ColumnName render_column_name(const SeriesKey& key, StatName stat);

// Inverse of render_column_name; requires exactly seven segments.
std::pair<SeriesKey, StatName> parse_column_name(std::string_view text);

// One span observation.
struct TelemetryRecord {
    int64_t timestamp = 0;  // epoch seconds UTC
    SeriesKey key;
    double response_time = 0.0;  // milliseconds, >= 0
};

// Line format of the raw record stream:
// "<iso8601>,<location>,<kind>,<host>,<method>,<statusCode>,<endpoint>,<response_time>"
std::string format_record_line(const TelemetryRecord& r);
TelemetryRecord parse_record_line(std::string_view line);

}  // namespace anobench
