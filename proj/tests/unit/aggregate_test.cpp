#include <doctest.h>

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "anobench/aggregate.hpp"
#include "anobench/errors.hpp"
#include "anobench/rng.hpp"
#include "anobench/stats.hpp"
#include "anobench/timeutil.hpp"

using namespace anobench;

namespace {

TelemetryRecord rec(int64_t ts, const SeriesKey& k, double rt) {
    return TelemetryRecord{ts, k, rt};
}

std::vector<TelemetryRecord> random_records(Rng& rng, size_t n) {
    std::vector<SeriesKey> keys;
    for (int i = 0; i < 6; ++i) {
        keys.push_back(make_series_key("dc" + std::to_string(1 + i % 2),
                                       i % 2 ? Kind::Client : Kind::Server,
                                       "h" + std::to_string(i), "GET",
                                       i % 3 == 0 ? 500 : 200,
                                       "ep" + std::to_string(i % 3)));
    }
    std::vector<TelemetryRecord> records;
    records.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        int64_t ts = 1706000000 + static_cast<int64_t>(rng.uniform_int(3600 * 4));
        records.push_back(rec(ts, keys[rng.uniform_int(keys.size())],
                              std::floor(rng.uniform(0.0, 500.0) * 16.0) / 16.0));
    }
    return records;
}

// Brute-force reference: group with a std::map keyed on (interval, rendered
// name), then compare row-by-row against the aggregator output.
using GroupMap = std::map<std::pair<int64_t, std::string>, std::vector<double>>;

GroupMap brute_group(const std::vector<TelemetryRecord>& records) {
    GroupMap groups;
    for (const auto& r : records) {
        auto name = render_column_name(r.key, StatName::Count).rendered;
        groups[{floor_to_interval(r.timestamp), name}].push_back(r.response_time);
    }
    return groups;
}

}  // namespace

TEST_SUITE("aggregate") {

TEST_CASE("groups by interval and key, expands non-null stats") {
    SeriesKey k = make_series_key("dc1", Kind::Server, "h1", "GET", 200, "ep1");
    Aggregator agg;
    agg.add(rec(100, k, 10.0));
    agg.add(rec(200, k, 20.0));
    agg.add(rec(301, k, 30.0));  // next interval, single sample
    AggregateResult result = agg.finish();
    CHECK(result.records_in == 3);

    // interval 0: full pair -> min/max/median/average/count/std (skew and
    // kurt need 3 and 4 samples); interval 300: singleton -> 5 stats.
    REQUIRE(result.table.size() == 6 + 5);
    const auto& rows = result.table.rows();
    CHECK(rows[0].interval_start == 0);
    CHECK(rows[0].stat == StatName::Minimum);
    CHECK(rows[0].value == 10.0);
    CHECK(rows[4].stat == StatName::Count);
    CHECK(rows[4].value == 2.0);
    CHECK(rows[5].stat == StatName::StdDev);
    CHECK(rows[6].interval_start == 300);
}

TEST_CASE("matches brute-force grouping on random input") {
    Rng rng(0xa66);
    auto records = random_records(rng, 20000);
    Aggregator agg;
    for (const auto& r : records) agg.add(r);
    AggregateResult result = agg.finish();
    CHECK(result.records_in == records.size());

    GroupMap groups = brute_group(records);

    // one pass over the output rows, bucketed back to (interval, series)
    std::map<std::pair<int64_t, std::string>, std::map<StatName, double>> got;
    for (const auto& row : result.table.rows()) {
        auto name = render_column_name(result.table.key_of(row), StatName::Count).rendered;
        got[{row.interval_start, name}][row.stat] = row.value;
    }
    REQUIRE(got.size() == groups.size());
    for (const auto& [gk, values] : groups) {
        auto it = got.find(gk);
        REQUIRE(it != got.end());
        AggregateStats want = compute_stats(values);
        const auto& stats = it->second;
        CHECK(stats.at(StatName::Count) == static_cast<double>(values.size()));
        CHECK(stats.at(StatName::Minimum) == want.minimum);
        CHECK(stats.at(StatName::Maximum) == want.maximum);
        CHECK(stats.at(StatName::Median) == doctest::Approx(want.median));
        CHECK(stats.at(StatName::Average) == doctest::Approx(want.average));
        CHECK(stats.count(StatName::StdDev) == size_t(want.std_dev.has_value()));
        CHECK(stats.count(StatName::Skewness) == size_t(want.skewness.has_value()));
        CHECK(stats.count(StatName::Kurtosis) == size_t(want.kurtosis.has_value()));
        if (want.std_dev) CHECK(stats.at(StatName::StdDev) == doctest::Approx(*want.std_dev));
    }
}

TEST_CASE("input order does not matter") {
    Rng rng(0xbee);
    auto records = random_records(rng, 5000);
    Aggregator fwd;
    for (const auto& r : records) fwd.add(r);
    auto a = fwd.finish();
    Aggregator rev;
    for (auto it = records.rbegin(); it != records.rend(); ++it) rev.add(*it);
    auto b = rev.finish();
    REQUIRE(a.table.size() == b.table.size());
    std::ostringstream sa, sb;
    a.table.write_csv(sa);
    b.table.write_csv(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("stream aggregation applies the malformed-line policy") {
    const std::string good1 = "2024-01-22 00:01:00+0000,dc1,SERVER,h1,GET,200,ep1,12.5\n";
    const std::string good2 = "2024-01-22 00:02:00+0000,dc1,SERVER,h1,GET,200,ep1,17.5\n";
    const std::string bad = "2024-01-22 00:02:30+0000,dc1,SERVER,h1,GET,not-a-code,ep1,1\n";

    SUBCASE("skip policy tolerates a bad line below the threshold") {
        std::istringstream in(good1 + good2 + bad + good1 + good2 + good1 + good2 +
                              good1 + good2 + good1 + good2 + good1 + good2);
        AggregateOptions opt;
        opt.malformed_threshold = 0.1;
        auto result = aggregate_stream(in, opt);
        CHECK(result.malformed_lines == 1);
        CHECK(result.records_in == 12);
    }
    SUBCASE("skip policy fails past the threshold") {
        std::istringstream in(good1 + bad + bad);
        AggregateOptions opt;
        opt.malformed_threshold = 0.5;
        CHECK_THROWS_AS(aggregate_stream(in, opt), DataError);
    }
    SUBCASE("fail policy throws on first bad line") {
        std::istringstream in(good1 + bad + good2);
        AggregateOptions opt;
        opt.on_malformed = MalformedPolicy::Fail;
        CHECK_THROWS_AS(aggregate_stream(in, opt), DataError);
    }
    SUBCASE("blank lines are ignored") {
        std::istringstream in(good1 + "\n" + good2 + "\n");
        auto result = aggregate_stream(in);
        CHECK(result.records_in == 2);
        CHECK(result.malformed_lines == 0);
    }
}

TEST_CASE("interval floor honors the configured width") {
    SeriesKey k = make_series_key("dc1", Kind::Server, "h1", "GET", 200, "ep1");
    AggregateOptions opt;
    opt.interval_seconds = 600;
    Aggregator agg(opt);
    agg.add(rec(599, k, 1.0));
    agg.add(rec(600, k, 2.0));
    auto result = agg.finish();
    const auto& rows = result.table.rows();
    CHECK(rows.front().interval_start == 0);
    CHECK(rows.back().interval_start == 600);
}

TEST_CASE("aggregator rejects nonsense options") {
    AggregateOptions opt;
    opt.interval_seconds = 0;
    CHECK_THROWS_AS(Aggregator{opt}, ConfigError);
    opt.interval_seconds = 300;
    opt.malformed_threshold = -0.5;
    CHECK_THROWS_AS(Aggregator{opt}, ConfigError);
}

}  // TEST_SUITE
