#include "anobench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"
#include "anobench/rng.hpp"

namespace anobench {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string location_name(int i) { return "datacenter" + std::to_string(i + 1); }

// Per-series traffic shape, fixed for the whole run.
struct SeriesProfile {
    SeriesKey identity;  // status_code -1: statuses are drawn per request
    uint64_t stream;     // substream seed for (config.seed, identity)
    double rate_factor;
    double day_phase;
    double week_phase;
    double latency_mu;     // log-space location of the response-time draw
    double latency_sigma;  // log-space scale
};

struct Fault {
    int64_t start;
    int64_t end;
    std::set<std::string> locations;  // empty: every location
    double error_multiplier;
    double latency_multiplier;

    bool applies(const std::string& location, int64_t ts) const {
        if (ts < start || ts >= end) return false;
        return locations.empty() || locations.count(location) > 0;
    }
};

int draw_status(Rng& rng, double error_rate) {
    double u = rng.uniform();
    if (u < error_rate) {
        return rng.uniform() < 0.8 ? 500 : 503;
    }
    double v = rng.uniform();
    if (v < 0.85) return 200;
    if (v < 0.90) return 204;
    if (v < 0.95) return 301;
    return 404;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (end <= start) {
        throw ConfigError("generator range empty: end <= start");
    }
    if (interval_seconds <= 0) {
        throw ConfigError("interval_seconds must be positive");
    }
    if (start % interval_seconds != 0 || end % interval_seconds != 0) {
        throw ConfigError("generator range must align to the interval length");
    }
    if (locations < 1 || hosts < 1 || endpoints < 1) {
        throw ConfigError("locations, hosts and endpoints must be >= 1");
    }
    if (methods.empty()) {
        throw ConfigError("method list is empty");
    }
    for (const auto& m : methods) {
        if (m.empty() || m.find('_') != std::string::npos) {
            throw ConfigError("bad method name '" + m + "'");
        }
    }
    if (!(base_rate > 0.0)) {
        throw ConfigError("base_rate must be positive");
    }
    if (daily_amp < 0.0 || daily_amp >= 1.0 || weekly_amp < 0.0 ||
        weekly_amp >= 1.0) {
        throw ConfigError("seasonal amplitudes must lie in [0, 1)");
    }
    if (error_rate_normal < 0.0 || error_rate_normal > 1.0) {
        throw ConfigError("error_rate_normal must lie in [0, 1]");
    }
    if (annotation_lead_seconds < 0) {
        throw ConfigError("annotation_lead_seconds must be >= 0");
    }
    std::set<std::string> known;
    for (int i = 0; i < locations; ++i) known.insert(location_name(i));
    for (size_t i = 0; i < anomalies.size(); ++i) {
        const auto& a = anomalies[i];
        if (a.end <= a.start) {
            throw ConfigError("anomaly " + std::to_string(i + 1) +
                              " has end <= start");
        }
        if (a.error_multiplier < 0.0 || a.latency_multiplier <= 0.0) {
            throw ConfigError("anomaly " + std::to_string(i + 1) +
                              " has a bad multiplier");
        }
        if (a.source < 0 || a.source > kSourceTestLog) {
            throw ConfigError("anomaly " + std::to_string(i + 1) +
                              " has unknown source " + std::to_string(a.source));
        }
        for (const auto& loc : a.locations) {
            if (!known.count(loc)) {
                throw ConfigError("anomaly " + std::to_string(i + 1) +
                                  " names unknown location '" + loc + "'");
            }
        }
    }
    for (size_t i = 0; i < downtimes.size(); ++i) {
        const auto& d = downtimes[i];
        if (d.end <= d.start) {
            throw ConfigError("downtime " + std::to_string(i + 1) +
                              " has end <= start");
        }
        if (!known.count(d.location)) {
            throw ConfigError("downtime " + std::to_string(i + 1) +
                              " names unknown location '" + d.location + "'");
        }
    }
}

GroundTruth generate(const GeneratorConfig& config, const RecordSink& sink) {
    config.validate();

    // Series identities in a fixed nested order; the values drawn for each
    // depend only on (seed, identity, interval), never on this order.
    std::vector<SeriesProfile> series;
    series.reserve(static_cast<size_t>(config.locations) * config.hosts *
                   config.endpoints * config.methods.size());
    for (int loc = 0; loc < config.locations; ++loc) {
        for (int host = 0; host < config.hosts; ++host) {
            std::string host_name =
                "component" + std::to_string(loc * config.hosts + host + 1);
            for (int ep = 0; ep < config.endpoints; ++ep) {
                Kind kind = ep % 2 == 0 ? Kind::Server : Kind::Client;
                std::string ep_name = "endpoint" + std::to_string(ep + 1);
                for (const auto& method : config.methods) {
                    SeriesProfile p;
                    p.identity = SeriesKey{location_name(loc), kind, host_name,
                                           method, -1, ep_name};
                    std::string tag = p.identity.location + '|' +
                                      std::string(kind_token(kind)) + '|' +
                                      host_name + '|' + method + '|' + ep_name;
                    p.stream = mix64(config.seed, fnv1a64(tag));
                    Rng setup(mix64(p.stream, 0x5e7f00dULL));
                    p.rate_factor = std::exp(setup.uniform(-0.5, 0.5));
                    p.day_phase = setup.uniform(0.0, kTwoPi);
                    p.week_phase = setup.uniform(0.0, kTwoPi);
                    // median latency between ~20ms and ~200ms
                    p.latency_mu = setup.uniform(std::log(20.0), std::log(200.0));
                    p.latency_sigma = setup.uniform(0.3, 0.6);
                    series.push_back(std::move(p));
                }
            }
        }
    }

    std::vector<Fault> faults;
    faults.reserve(config.anomalies.size());
    for (const auto& a : config.anomalies) {
        faults.push_back(Fault{a.start,
                               a.end,
                               {a.locations.begin(), a.locations.end()},
                               a.error_multiplier,
                               a.latency_multiplier});
    }

    uint64_t emitted = 0;
    for (int64_t interval = config.start; interval < config.end;
         interval += config.interval_seconds) {
        for (const auto& p : series) {
            Rng rng(mix64(p.stream, static_cast<uint64_t>(interval)));
            double day = kTwoPi *
                         static_cast<double>(seconds_into_day(interval)) /
                         static_cast<double>(kSecondsPerDay);
            double week = kTwoPi *
                          static_cast<double>(seconds_into_week(interval)) /
                          static_cast<double>(kSecondsPerWeek);
            double seasonal =
                (1.0 + config.daily_amp * std::sin(day + p.day_phase)) *
                (1.0 + config.weekly_amp * std::sin(week + p.week_phase));
            int64_t count = rng.poisson(config.base_rate * p.rate_factor * seasonal);
            for (int64_t i = 0; i < count; ++i) {
                int64_t ts = interval + static_cast<int64_t>(rng.uniform_int(
                                            static_cast<uint64_t>(
                                                config.interval_seconds)));
                double error_rate = config.error_rate_normal;
                double latency_scale = 1.0;
                for (const auto& f : faults) {
                    if (f.applies(p.identity.location, ts)) {
                        error_rate *= f.error_multiplier;
                        latency_scale *= f.latency_multiplier;
                    }
                }
                error_rate = std::min(error_rate, 0.95);
                int status = draw_status(rng, error_rate);
                double response =
                    latency_scale *
                    std::exp(p.latency_mu + p.latency_sigma * rng.normal());
                if (status >= 500) response *= 1.5;

                bool down = false;
                for (const auto& d : config.downtimes) {
                    if (d.location == p.identity.location && ts >= d.start &&
                        ts < d.end) {
                        down = true;
                        break;
                    }
                }
                if (down) continue;

                TelemetryRecord r;
                r.timestamp = ts;
                r.key = p.identity;
                r.key.status_code = status;
                r.response_time = response;
                sink(r);
                ++emitted;
            }
        }
    }
    log_info() << "generated " << emitted << " records over "
               << (config.end - config.start) / config.interval_seconds
               << " intervals";

    GroundTruth truth;
    int next_source = kSourceIssueTracker;
    for (size_t i = 0; i < config.anomalies.size(); ++i) {
        const auto& a = config.anomalies[i];
        AnomalyWindow w;
        w.number = static_cast<int>(i + 1);
        w.start = utc_time(a.start - config.annotation_lead_seconds);
        w.end = utc_time(a.end);
        if (a.source == 0) {
            w.source = next_source;
            next_source = next_source == kSourceTestLog ? kSourceIssueTracker
                                                        : next_source + 1;
        } else {
            w.source = a.source;
        }
        truth.windows.push_back(w);
    }
    std::sort(truth.windows.begin(), truth.windows.end(),
              [](const AnomalyWindow& a, const AnomalyWindow& b) {
                  return a.start.epoch_seconds < b.start.epoch_seconds;
              });
    for (const auto& d : config.downtimes) {
        truth.downtimes.push_back(
            DowntimeEvent{d.location, utc_time(d.start), utc_time(d.end)});
    }
    return truth;
}

GroundTruth generate(const GeneratorConfig& config,
                     std::vector<TelemetryRecord>& records) {
    return generate(config,
                    [&records](const TelemetryRecord& r) { records.push_back(r); });
}

void write_ground_truth(const GroundTruth& truth, const std::string& windows_path,
                        const std::string& downtime_path) {
    {
        auto out = csv::open_output(windows_path);
        out << "number,anomaly_start,anomaly_end,anomaly_source\n";
        for (const auto& w : truth.windows) {
            out << w.number << ',' << format_iso8601(w.start) << ','
                << format_iso8601(w.end) << ',' << w.source << '\n';
        }
        if (!out) throw IoError("write failed for '" + windows_path + "'");
    }
    {
        auto out = csv::open_output(downtime_path);
        out << "location,downtime_start,downtime_end\n";
        for (const auto& d : truth.downtimes) {
            out << d.location << ',' << format_iso8601(d.start) << ','
                << format_iso8601(d.end) << '\n';
        }
        if (!out) throw IoError("write failed for '" + downtime_path + "'");
    }
}

GroundTruth generate_to_file(const GeneratorConfig& config,
                             const std::string& records_path) {
    auto out = csv::open_output(records_path);
    GroundTruth truth = generate(config, [&out](const TelemetryRecord& r) {
        out << format_record_line(r) << '\n';
    });
    if (!out) throw IoError("write failed for '" + records_path + "'");
    return truth;
}

}  // namespace anobench
