#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anobench/scoring.hpp"
#include "anobench/series.hpp"
#include "anobench/timeutil.hpp"

namespace anobench {

// One injected fault: inside [start, end) the listed locations see their
// server-error probability multiplied by error_multiplier and their response
// times by latency_multiplier. source 0 means assign round-robin.
struct AnomalyInjection {
    int64_t start = 0;
    int64_t end = 0;
    std::vector<std::string> locations;
    double error_multiplier = 10.0;
    double latency_multiplier = 3.0;
    int source = 0;
};

struct DowntimeSpec {
    std::string location;
    int64_t start = 0;
    int64_t end = 0;
};

struct GeneratorConfig {
    uint64_t seed = 1;
    int64_t start = 0;  // epoch seconds, inclusive
    int64_t end = 0;    // exclusive
    int locations = 2;
    int hosts = 3;
    int endpoints = 10;
    std::vector<std::string> methods = {"GET", "POST", "PUT"};
    double base_rate = 0.3;  // expected requests per series per interval
    double daily_amp = 0.5;
    double weekly_amp = 0.25;
    double error_rate_normal = 0.05;  // baseline per-request 5XX probability
    std::vector<AnomalyInjection> anomalies;
    std::vector<DowntimeSpec> downtimes;
    // Ground-truth windows start this many seconds before the injected fault,
    // mimicking report-delay annotation. 0 keeps the echo exact.
    int64_t annotation_lead_seconds = 0;
    int64_t interval_seconds = kDefaultIntervalSeconds;

    void validate() const;  // throws ConfigError
};

using RecordSink = std::function<void(const TelemetryRecord&)>;

// Streams deterministic synthetic telemetry into the sink and returns the
// ground truth echoing the config's injections. Each series draws from a
// substream keyed on (seed, series identity), so the output is independent
// of iteration or scheduling order.
GroundTruth generate(const GeneratorConfig& config, const RecordSink& sink);

// Convenience wrapper collecting the records.
GroundTruth generate(const GeneratorConfig& config, std::vector<TelemetryRecord>& records);

// Writes anomaly_windows.csv and location_downtime.csv.
void write_ground_truth(const GroundTruth& truth, const std::string& windows_path,
                        const std::string& downtime_path);

// Writes the newline-delimited raw record stream while generating.
GroundTruth generate_to_file(const GeneratorConfig& config, const std::string& records_path);

}  // namespace anobench
