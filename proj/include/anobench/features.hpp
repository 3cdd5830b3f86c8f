#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anobench/scoring.hpp"
#include "anobench/table.hpp"

namespace anobench {

// Dense model input: rows are intervals, columns are features. Built from a
// PivotedFrame with nulls imputed to zero; seasonality features, when added,
// sit after the (sorted) data columns.
struct FeatureMatrix {
    std::vector<int64_t> axis;
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // rows() == axis.size(), cols() == names.size()
};

// Keeps exactly the columns with a 5XX status code and the count statistic.
// Throws ConfigError when nothing matches.
PivotedFrame select_5xx_count(const PivotedFrame& frame);

// Null cells become 0.
FeatureMatrix frame_to_matrix(const PivotedFrame& frame);

inline constexpr const char* kSeasonalNames[4] = {
    "seasonal_day_sin", "seasonal_day_cos", "seasonal_week_sin", "seasonal_week_cos"};

// Appends sin/cos of the daily and weekly phase (week anchored Monday 00:00 UTC).
void add_seasonality(FeatureMatrix& matrix);

struct SplitSpec {
    int64_t train_start = 0;
    int64_t train_end = 0;  // exclusive
    int64_t test_start = 0;
    int64_t test_end = 0;  // exclusive
    int64_t anomaly_buffer_seconds = 0;

    void validate() const;  // throws ConfigError (overlap, empty ranges)
};

// Range split of the frame rows. With a positive buffer, training rows whose
// interval lies in any window widened by the buffer on both sides are
// excluded. Throws ConfigError when the training side ends up empty.
std::pair<PivotedFrame, PivotedFrame> split(const PivotedFrame& frame, const SplitSpec& spec,
                                            const std::vector<AnomalyWindow>& windows);

// Per-feature min/max learned from training rows only. transform() maps
// x -> (x - min) / (max - min); constant features map to 0; out-of-range
// values are not clipped. Columns are aligned by name: features unseen in
// training are dropped, training features missing at transform time are
// zero-filled.
class MinMaxScaler {
public:
    void fit(const FeatureMatrix& train);
    FeatureMatrix transform(const FeatureMatrix& matrix) const;

    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }

    void save(const std::string& path) const;
    static MinMaxScaler load(const std::string& path);

private:
    std::vector<std::string> names_;
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

}  // namespace anobench
