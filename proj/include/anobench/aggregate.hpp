#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "anobench/series.hpp"
#include "anobench/table.hpp"

namespace anobench {

enum class MalformedPolicy { Skip, Fail };

struct AggregateOptions {
    int64_t interval_seconds = kDefaultIntervalSeconds;
    MalformedPolicy on_malformed = MalformedPolicy::Skip;
    // Skip policy still fails when more than this fraction of lines is bad.
    double malformed_threshold = 0.01;
};

struct AggregateResult {
    UnpivotedTable table;
    uint64_t records_in = 0;
    uint64_t malformed_lines = 0;
};

// Groups records by (interval, series) and expands each group into one row
// per non-null statistic, ordered by interval then rendered key.
class Aggregator {
public:
    explicit Aggregator(AggregateOptions options = {});

    void add(const TelemetryRecord& record);
    // Parses one raw stream line, honoring the malformed-line policy.
    void add_line(std::string_view line);

    AggregateResult finish();

private:
    struct GroupKey {
        int64_t interval;
        uint32_t key_index;
        bool operator==(const GroupKey&) const = default;
    };
    struct GroupKeyHash {
        size_t operator()(const GroupKey& g) const;
    };

    AggregateOptions options_;
    UnpivotedTable table_;
    std::unordered_map<GroupKey, std::vector<double>, GroupKeyHash> groups_;
    uint64_t records_in_ = 0;
    uint64_t malformed_ = 0;
    uint64_t lines_ = 0;
};

AggregateResult aggregate_stream(std::istream& in, AggregateOptions options = {});
AggregateResult aggregate_file(const std::string& path, AggregateOptions options = {});

}  // namespace anobench
