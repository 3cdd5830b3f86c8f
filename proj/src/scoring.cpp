#include "anobench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"

namespace anobench {

namespace {

// Axis slots covered by [start, end): indexes in [lo, hi).
std::pair<size_t, size_t> window_span(const std::vector<int64_t>& axis,
                                      int64_t start, int64_t end) {
    auto lo = std::lower_bound(axis.begin(), axis.end(), start);
    auto hi = std::lower_bound(axis.begin(), axis.end(), end);
    return {static_cast<size_t>(lo - axis.begin()),
            static_cast<size_t>(hi - axis.begin())};
}

void validate_windows(const std::vector<AnomalyWindow>& windows) {
    std::set<int> numbers;
    for (const auto& w : windows) {
        if (w.end.epoch_seconds <= w.start.epoch_seconds) {
            throw DataError("window " + std::to_string(w.number) +
                            " has end <= start");
        }
        if (w.source < kSourceIssueTracker || w.source > kSourceTestLog) {
            throw DataError("window " + std::to_string(w.number) +
                            " has unknown source " + std::to_string(w.source));
        }
        if (!numbers.insert(w.number).second) {
            throw DataError("duplicate window number " + std::to_string(w.number));
        }
    }
}

std::vector<AnomalyWindow> sorted_windows(std::vector<AnomalyWindow> windows) {
    std::sort(windows.begin(), windows.end(),
              [](const AnomalyWindow& a, const AnomalyWindow& b) {
                  if (a.start.epoch_seconds != b.start.epoch_seconds)
                      return a.start.epoch_seconds < b.start.epoch_seconds;
                  return a.end.epoch_seconds < b.end.epoch_seconds;
              });
    return windows;
}

std::vector<AnomalyWindow> merge_windows(const std::vector<AnomalyWindow>& input) {
    std::vector<AnomalyWindow> windows = sorted_windows(input);
    std::vector<AnomalyWindow> merged;
    for (const auto& w : windows) {
        if (!merged.empty() &&
            w.start.epoch_seconds < merged.back().end.epoch_seconds) {
            log_warn() << "windows " << merged.back().number << " and " << w.number
                       << " overlap; merging for scoring";
            merged.back().end.epoch_seconds = std::max(
                merged.back().end.epoch_seconds, w.end.epoch_seconds);
        } else {
            merged.push_back(w);
        }
    }
    return merged;
}

}  // namespace

const CostProfile& standard_profile() {
    static const CostProfile p{"standard", 1.0, 1.0, 0.11, 1.0};
    return p;
}

const CostProfile& reward_low_fn_profile() {
    static const CostProfile p{"reward_low_fn", 1.0, 2.0, 0.11, 1.0};
    return p;
}

const CostProfile& profile_by_name(const std::string& name) {
    if (name == "standard") return standard_profile();
    if (name == "reward_low_fn") return reward_low_fn_profile();
    throw ConfigError("unknown cost profile '" + name + "'");
}

void DetectionSeries::validate() const {
    if (axis.empty()) {
        throw DataError("detection series is empty");
    }
    if (flags.size() != axis.size()) {
        throw DataError("detection series has " + std::to_string(flags.size()) +
                        " flags for " + std::to_string(axis.size()) + " points");
    }
    if (axis.size() >= 2) {
        int64_t step = axis[1] - axis[0];
        if (step <= 0) {
            throw DataError("detection axis is not increasing");
        }
        for (size_t i = 2; i < axis.size(); ++i) {
            if (axis[i] - axis[i - 1] != step) {
                throw DataError("detection axis is not evenly spaced");
            }
        }
    }
}

PointConfusion point_confusion(const DetectionSeries& series,
                               const std::vector<AnomalyWindow>& windows) {
    series.validate();
    validate_windows(windows);
    std::vector<bool> positive(series.axis.size(), false);
    for (const auto& w : windows) {
        auto [lo, hi] =
            window_span(series.axis, w.start.epoch_seconds, w.end.epoch_seconds);
        for (size_t i = lo; i < hi; ++i) positive[i] = true;
    }
    PointConfusion c;
    for (size_t i = 0; i < series.axis.size(); ++i) {
        if (series.flags[i]) {
            (positive[i] ? c.tp : c.fp) += 1;
        } else {
            (positive[i] ? c.fn : c.tn) += 1;
        }
    }
    return c;
}

double nab_detection_weight(double position) {
    return 1.0 / (1.0 + std::exp(10.0 * position - 5.0));
}

NabScore nab_score(const DetectionSeries& series,
                   const std::vector<AnomalyWindow>& windows,
                   const CostProfile& profile) {
    series.validate();
    validate_windows(windows);
    if (windows.empty()) {
        throw ConfigError("cannot score against an empty window set");
    }
    if (profile.tp_weight < 0.0 || profile.fn_weight < 0.0 ||
        profile.fp_weight < 0.0 || profile.tn_weight < 0.0) {
        throw ConfigError("cost profile weights must be non-negative");
    }

    std::vector<AnomalyWindow> merged = merge_windows(windows);
    const size_t n_windows = merged.size();

    struct Span {
        size_t lo;
        size_t hi;  // exclusive
    };
    std::vector<Span> spans;
    spans.reserve(n_windows);
    for (const auto& w : merged) {
        auto [lo, hi] =
            window_span(series.axis, w.start.epoch_seconds, w.end.epoch_seconds);
        if (lo == hi) {
            throw DataError("window " + std::to_string(w.number) +
                            " covers no point of the detection axis");
        }
        spans.push_back({lo, hi});
    }

    // Anchor scores accumulate window by window exactly like the detector
    // path below, so a perfect (or null) detector reproduces them bitwise
    // and normalizes to 100 (or 0) with no rounding slack.
    const double w0 = nab_detection_weight(0.0);
    double raw_perfect = 0.0;
    double raw_null = 0.0;
    for (size_t k = 0; k < n_windows; ++k) {
        raw_perfect += profile.tp_weight * w0;
        raw_null -= profile.fn_weight;
    }
    const double denom = raw_perfect - raw_null;
    if (!(denom > 0.0)) {
        throw ConfigError("degenerate cost profile: perfect and null scores match");
    }

    double raw = 0.0;
    // Window credits: first in-window detection at relative slot position
    // p = offset / window-length; later in-window flags are ignored.
    for (size_t k = 0; k < n_windows; ++k) {
        const auto [lo, hi] = spans[k];
        bool detected = false;
        for (size_t i = lo; i < hi; ++i) {
            if (series.flags[i]) {
                double p = static_cast<double>(i - lo) /
                           static_cast<double>(hi - lo);
                raw += profile.tp_weight * nab_detection_weight(p);
                detected = true;
                break;
            }
        }
        if (!detected) raw -= profile.fn_weight;
    }

    // False positives: flags outside every window. A flag d slots past the
    // last point of the preceding window (d = 1 immediately after) gets its
    // penalty discounted while d <= B, where B is that window's slot length.
    size_t next_window = 0;
    for (size_t i = 0; i < series.axis.size(); ++i) {
        if (!series.flags[i]) continue;
        while (next_window < n_windows && spans[next_window].hi <= i) {
            ++next_window;
        }
        if (next_window < n_windows && i >= spans[next_window].lo) {
            continue;  // in-window: credited or ignored above
        }
        double g = 1.0;
        if (next_window > 0) {
            const auto& prev = spans[next_window - 1];
            const size_t d = i - (prev.hi - 1);
            const size_t b = prev.hi - prev.lo;
            if (d <= b) {
                g = 1.0 / (1.0 + std::exp(5.0 - 10.0 * static_cast<double>(d) /
                                                    static_cast<double>(b)));
            }
        }
        raw -= profile.fp_weight * g;
    }

    NabScore score;
    score.raw = raw;
    score.raw_null = raw_null;
    score.raw_perfect = raw_perfect;
    // Divide before scaling: (raw - raw_null) / denom is exactly 1.0 (or
    // 0.0) for the perfect (or null) detector, so the anchors land on 100
    // and 0 with no rounding.
    score.normalized = 100.0 * ((raw - raw_null) / denom);
    return score;
}

std::map<int, std::pair<int, int>> per_source_counts(
    const DetectionSeries& series, const std::vector<AnomalyWindow>& windows) {
    series.validate();
    validate_windows(windows);
    std::map<int, std::pair<int, int>> counts;
    for (const auto& w : windows) {
        auto& [detected, total] = counts[w.source];
        ++total;
        auto [lo, hi] =
            window_span(series.axis, w.start.epoch_seconds, w.end.epoch_seconds);
        for (size_t i = lo; i < hi; ++i) {
            if (series.flags[i]) {
                ++detected;
                break;
            }
        }
    }
    return counts;
}

std::vector<WindowDetection> window_detections(
    const DetectionSeries& series, const std::vector<AnomalyWindow>& windows,
    const std::vector<DowntimeEvent>& downtimes) {
    series.validate();
    validate_windows(windows);
    std::vector<WindowDetection> out;
    for (const auto& w : sorted_windows(windows)) {
        WindowDetection d;
        d.number = w.number;
        d.source = w.source;
        auto [lo, hi] =
            window_span(series.axis, w.start.epoch_seconds, w.end.epoch_seconds);
        for (size_t i = lo; i < hi; ++i) {
            if (series.flags[i]) {
                d.detected = true;
                d.first_position = static_cast<double>(i - lo) /
                                   static_cast<double>(hi - lo);
                d.first_time = series.axis[i];
                break;
            }
        }
        for (const auto& e : downtimes) {
            if (e.start.epoch_seconds < w.end.epoch_seconds &&
                w.start.epoch_seconds < e.end.epoch_seconds) {
                d.overlaps_downtime = true;
                break;
            }
        }
        out.push_back(d);
    }
    return out;
}

ScoreReport score_report(const DetectionSeries& series, const GroundTruth& truth,
                         const std::vector<CostProfile>& profiles) {
    ScoreReport report;
    report.point = point_confusion(series, truth.windows);
    for (const auto& p : profiles) {
        report.profiles.emplace_back(p, nab_score(series, truth.windows, p));
    }
    report.per_source = per_source_counts(series, truth.windows);
    report.windows = window_detections(series, truth.windows, truth.downtimes);
    return report;
}

GroundTruth load_ground_truth(const std::string& windows_path,
                              const std::string& downtime_path) {
    GroundTruth truth;
    if (!windows_path.empty()) {
        auto in = csv::open_input(windows_path);
        std::string line;
        if (!csv::getline(in, line) ||
            line != "number,anomaly_start,anomaly_end,anomaly_source") {
            throw DataError("bad header in '" + windows_path + "'");
        }
        size_t lineno = 1;
        while (csv::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto fields = csv::split(line);
            if (fields.size() != 4) {
                throw DataError("'" + windows_path + "' line " +
                                std::to_string(lineno) + " has " +
                                std::to_string(fields.size()) + " fields");
            }
            AnomalyWindow w;
            w.number = static_cast<int>(csv::parse_int(fields[0]));
            w.start = parse_iso8601(fields[1]);
            w.end = parse_iso8601(fields[2]);
            w.source = static_cast<int>(csv::parse_int(fields[3]));
            truth.windows.push_back(w);
        }
        validate_windows(truth.windows);
        truth.windows = sorted_windows(std::move(truth.windows));
    }
    if (!downtime_path.empty()) {
        auto in = csv::open_input(downtime_path);
        std::string line;
        if (!csv::getline(in, line) ||
            line != "location,downtime_start,downtime_end") {
            throw DataError("bad header in '" + downtime_path + "'");
        }
        size_t lineno = 1;
        while (csv::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto fields = csv::split(line);
            if (fields.size() != 3) {
                throw DataError("'" + downtime_path + "' line " +
                                std::to_string(lineno) + " has " +
                                std::to_string(fields.size()) + " fields");
            }
            DowntimeEvent e;
            e.location = std::string(fields[0]);
            e.start = parse_iso8601(fields[1]);
            e.end = parse_iso8601(fields[2]);
            if (e.end.epoch_seconds <= e.start.epoch_seconds) {
                throw DataError("downtime on line " + std::to_string(lineno) +
                                " has end <= start");
            }
            truth.downtimes.push_back(e);
        }
    }
    return truth;
}

}  // namespace anobench
