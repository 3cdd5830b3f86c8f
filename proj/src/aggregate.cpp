#include "anobench/aggregate.hpp"

#include <istream>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"
#include "anobench/rng.hpp"
#include "anobench/stats.hpp"

namespace anobench {

size_t Aggregator::GroupKeyHash::operator()(const GroupKey& g) const {
    return static_cast<size_t>(
        mix64(static_cast<uint64_t>(g.interval), g.key_index));
}

Aggregator::Aggregator(AggregateOptions options) : options_(options) {
    if (options_.interval_seconds <= 0) {
        throw ConfigError("interval_seconds must be positive");
    }
    if (options_.malformed_threshold < 0.0 || options_.malformed_threshold > 1.0) {
        throw ConfigError("malformed_threshold must lie in [0, 1]");
    }
}

void Aggregator::add(const TelemetryRecord& record) {
    ++records_in_;
    GroupKey group{floor_to_interval(record.timestamp, options_.interval_seconds),
                   table_.intern_key(record.key)};
    groups_[group].push_back(record.response_time);
}

void Aggregator::add_line(std::string_view line) {
    ++lines_;
    try {
        add(parse_record_line(line));
    } catch (const DataError& e) {
        ++malformed_;
        if (options_.on_malformed == MalformedPolicy::Fail) {
            throw DataError("malformed record on line " + std::to_string(lines_) +
                            ": " + e.what());
        }
        if (malformed_ <= 5) {
            log_warn() << "skipping malformed record on line " << lines_ << ": "
                       << e.what();
        }
    }
}

AggregateResult Aggregator::finish() {
    if (lines_ > 0 && options_.on_malformed == MalformedPolicy::Skip) {
        double fraction = static_cast<double>(malformed_) / static_cast<double>(lines_);
        if (fraction > options_.malformed_threshold) {
            throw DataError(std::to_string(malformed_) + " of " +
                            std::to_string(lines_) +
                            " lines malformed, above the " +
                            csv::format_double(options_.malformed_threshold) +
                            " threshold");
        }
    }
    for (auto& [group, values] : groups_) {
        AggregateStats stats = compute_stats(values);
        for (StatName stat : kAllStats) {
            if (auto v = stats.get(stat)) {
                table_.add_row(group.interval, group.key_index, stat, *v);
            }
        }
    }
    groups_.clear();
    table_.sort_and_check();
    if (malformed_ > 0) {
        log_info() << "aggregated " << records_in_ << " records, skipped "
                   << malformed_ << " malformed lines";
    }
    AggregateResult result{std::move(table_), records_in_, malformed_};
    table_ = UnpivotedTable{};
    records_in_ = 0;
    malformed_ = 0;
    lines_ = 0;
    return result;
}

AggregateResult aggregate_stream(std::istream& in, AggregateOptions options) {
    Aggregator agg(options);
    std::string line;
    while (csv::getline(in, line)) {
        if (line.empty()) continue;
        agg.add_line(line);
    }
    return agg.finish();
}

AggregateResult aggregate_file(const std::string& path, AggregateOptions options) {
    auto in = csv::open_input(path);
    return aggregate_stream(in, options);
}

}  // namespace anobench
