#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "anobench/timeutil.hpp"

namespace anobench {

inline constexpr int kSourceIssueTracker = 1;
inline constexpr int kSourceInstantMessenger = 2;
inline constexpr int kSourceTestLog = 3;

// Ground-truth anomaly interval [start, end) with the reporting source.
struct AnomalyWindow {
    int number = 0;
    OffsetDateTime start;
    OffsetDateTime end;
    int source = kSourceIssueTracker;
};

// Planned or unplanned removal of one location from rotation.
struct DowntimeEvent {
    std::string location;
    OffsetDateTime start;
    OffsetDateTime end;
};

struct GroundTruth {
    std::vector<AnomalyWindow> windows;
    std::vector<DowntimeEvent> downtimes;
};

// Cost profile for the window-based score (table rows "Standard" and
// "Reward Low FN").
struct CostProfile {
    std::string name;
    double tp_weight = 1.0;
    double fn_weight = 1.0;
    double fp_weight = 0.11;
    double tn_weight = 1.0;
};

const CostProfile& standard_profile();
const CostProfile& reward_low_fn_profile();
const CostProfile& profile_by_name(const std::string& name);

// Per-interval detection flags aligned to an interval axis.
struct DetectionSeries {
    std::vector<int64_t> axis;  // interval starts, ascending, uniform spacing
    std::vector<bool> flags;    // same length as axis

    void validate() const;  // throws DataError on misalignment
};

struct PointConfusion {
    int64_t tp = 0;
    int64_t tn = 0;
    int64_t fp = 0;
    int64_t fn = 0;
};

// A point is ground-truth positive iff its interval start lies in a window.
PointConfusion point_confusion(const DetectionSeries& series,
                               const std::vector<AnomalyWindow>& windows);

struct NabScore {
    double raw = 0.0;
    double raw_null = 0.0;     // every window missed, no false positives
    double raw_perfect = 0.0;  // every window detected at position 0, no FPs
    double normalized = 0.0;   // 100 * (raw - null) / (perfect - null)
};

// Positional weight of the first in-window detection: 1 near the window
// start decaying to ~0 near its end.
double nab_detection_weight(double position);

// Window-based score. The first in-window detection earns
// tp_weight * w(p); later in-window detections are ignored; a missed window
// costs fn_weight. False positives cost fp_weight, discounted right after a
// window end (the grace span is one length of the preceding window).
// Overlapping windows are merged with a warning. Throws ConfigError on an
// all-zero profile or an empty window set.
NabScore nab_score(const DetectionSeries& series, const std::vector<AnomalyWindow>& windows,
                   const CostProfile& profile);

// source -> (detected windows, total windows)
std::map<int, std::pair<int, int>> per_source_counts(const DetectionSeries& series,
                                                     const std::vector<AnomalyWindow>& windows);

// Per-window detection detail for the report.
struct WindowDetection {
    int number = 0;
    int source = 0;
    bool detected = false;
    double first_position = -1.0;   // p of the first in-window flag, -1 if missed
    int64_t first_time = 0;         // interval start of that flag
    bool overlaps_downtime = false;
};

std::vector<WindowDetection> window_detections(const DetectionSeries& series,
                                               const std::vector<AnomalyWindow>& windows,
                                               const std::vector<DowntimeEvent>& downtimes);

struct ScoreReport {
    PointConfusion point;
    std::vector<std::pair<CostProfile, NabScore>> profiles;
    std::map<int, std::pair<int, int>> per_source;
    std::vector<WindowDetection> windows;
};

ScoreReport score_report(const DetectionSeries& series, const GroundTruth& truth,
                         const std::vector<CostProfile>& profiles);

// anomaly_windows.csv / location_downtime.csv loaders. Validates headers,
// timestamps, unique window IDs and start < end; windows come back sorted
// by start. Either path may be empty to skip that file.
GroundTruth load_ground_truth(const std::string& windows_path,
                              const std::string& downtime_path);

}  // namespace anobench
