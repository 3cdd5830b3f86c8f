#include "anobench/series.hpp"

#include <charconv>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/timeutil.hpp"

namespace anobench {

namespace {

void check_segment(std::string_view value, std::string_view what) {
    if (value.empty()) {
        throw GrammarError("series " + std::string(what) + " is empty");
    }
    if (value.find('_') != std::string_view::npos) {
        throw GrammarError("series " + std::string(what) + " '" +
                           std::string(value) + "' contains '_'");
    }
}

}  // namespace

std::string_view kind_token(Kind k) {
    return k == Kind::Client ? "CLIENT" : "SERVER";
}

std::optional<Kind> kind_from_token(std::string_view token) {
    if (token == "CLIENT") return Kind::Client;
    if (token == "SERVER") return Kind::Server;
    return std::nullopt;
}

std::string_view stat_token(StatName s) {
    switch (s) {
        case StatName::Minimum: return "min";
        case StatName::Maximum: return "max";
        case StatName::Median: return "median";
        case StatName::Average: return "average";
        case StatName::Count: return "count";
        case StatName::StdDev: return "std";
        case StatName::Skewness: return "skew";
        case StatName::Kurtosis: return "kurt";
    }
    throw DataError("unknown StatName value");
}

std::optional<StatName> stat_from_token(std::string_view token) {
    if (token == "min" || token == "minimum") return StatName::Minimum;
    if (token == "max" || token == "maximum") return StatName::Maximum;
    if (token == "median" || token == "p50") return StatName::Median;
    if (token == "average" || token == "mean" || token == "avg")
        return StatName::Average;
    if (token == "count" || token == "n") return StatName::Count;
    if (token == "std" || token == "stddev" || token == "stdev" || token == "sd")
        return StatName::StdDev;
    if (token == "skew" || token == "skewness") return StatName::Skewness;
    if (token == "kurt" || token == "kurtosis") return StatName::Kurtosis;
    return std::nullopt;
}

void SeriesKey::validate() const {
    check_segment(location, "location");
    check_segment(host, "host");
    check_segment(method, "method");
    check_segment(endpoint, "endpoint");
    if (status_code != -1 && (status_code < 100 || status_code > 599)) {
        throw GrammarError("status code " + std::to_string(status_code) +
                           " outside {-1} U [100, 599]");
    }
}

SeriesKey make_series_key(std::string location, Kind kind, std::string host,
                          std::string method, int status_code,
                          std::string endpoint) {
    SeriesKey key{std::move(location), kind,        std::move(host),
                  std::move(method),   status_code, std::move(endpoint)};
    key.validate();
    return key;
}

ColumnName render_column_name(const SeriesKey& key, StatName stat) {
    key.validate();
    std::string out;
    out.reserve(key.location.size() + key.host.size() + key.method.size() +
                key.endpoint.size() + 24);
    out += key.location;
    out += '_';
    out += kind_token(key.kind);
    out += '_';
    out += key.host;
    out += '_';
    out += key.method;
    out += '_';
    out += std::to_string(key.status_code);
    out += '_';
    out += key.endpoint;
    out += '_';
    out += stat_token(stat);
    return ColumnName{key, stat, std::move(out)};
}

std::pair<SeriesKey, StatName> parse_column_name(std::string_view text) {
    std::array<std::string_view, 7> seg;
    size_t count = 0;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '_') {
            if (count >= seg.size()) {
                throw GrammarError("column name '" + std::string(text) +
                                   "' has more than 7 segments");
            }
            seg[count++] = text.substr(start, i - start);
            start = i + 1;
        }
    }
    if (count != seg.size()) {
        throw GrammarError("column name '" + std::string(text) + "' has " +
                           std::to_string(count) + " segments, expected 7");
    }

    auto kind = kind_from_token(seg[1]);
    if (!kind) {
        throw GrammarError("unknown kind '" + std::string(seg[1]) + "' in '" +
                           std::string(text) + "'");
    }
    int status = 0;
    {
        const char* first = seg[4].data();
        const char* last = first + seg[4].size();
        auto [ptr, ec] = std::from_chars(first, last, status);
        if (ec != std::errc() || ptr != last) {
            throw GrammarError("bad status code '" + std::string(seg[4]) +
                               "' in '" + std::string(text) + "'");
        }
    }
    auto stat = stat_from_token(seg[6]);
    if (!stat) {
        throw GrammarError("unknown statistic '" + std::string(seg[6]) + "' in '" +
                           std::string(text) + "'");
    }

    SeriesKey key{std::string(seg[0]), *kind,  std::string(seg[2]),
                  std::string(seg[3]), status, std::string(seg[5])};
    key.validate();
    return {std::move(key), *stat};
}

std::string format_record_line(const TelemetryRecord& r) {
    std::string out = format_iso8601(utc_time(r.timestamp));
    out += ',';
    out += r.key.location;
    out += ',';
    out += kind_token(r.key.kind);
    out += ',';
    out += r.key.host;
    out += ',';
    out += r.key.method;
    out += ',';
    out += std::to_string(r.key.status_code);
    out += ',';
    out += r.key.endpoint;
    out += ',';
    out += csv::format_double(r.response_time);
    return out;
}

TelemetryRecord parse_record_line(std::string_view line) {
    auto fields = csv::split(line, ',');
    if (fields.size() != 8) {
        throw DataError("record line has " + std::to_string(fields.size()) +
                        " fields, expected 8: '" + std::string(line) + "'");
    }
    TelemetryRecord r;
    r.timestamp = parse_iso8601(fields[0]).epoch_seconds;
    auto kind = kind_from_token(fields[2]);
    if (!kind) {
        throw DataError("unknown kind '" + std::string(fields[2]) + "'");
    }
    int status = 0;
    {
        const char* first = fields[5].data();
        const char* last = first + fields[5].size();
        auto [ptr, ec] = std::from_chars(first, last, status);
        if (ec != std::errc() || ptr != last) {
            throw DataError("bad status code '" + std::string(fields[5]) + "'");
        }
    }
    r.key = SeriesKey{std::string(fields[1]), *kind,  std::string(fields[3]),
                      std::string(fields[4]), status, std::string(fields[6])};
    r.key.validate();
    r.response_time = csv::parse_double(fields[7]);
    if (!(r.response_time >= 0.0)) {
        throw DataError("negative response time in '" + std::string(line) + "'");
    }
    return r;
}

}  // namespace anobench
