#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "anobench/series.hpp"

namespace anobench {

// Aggregate of one (interval, series) group of response times. min/max/
// median/average exist for any non-empty group; the higher moments need a
// minimum sample count (std: 2, skewness: 3, kurtosis: 4) and a non-zero
// spread, and are null otherwise.
struct AggregateStats {
    double minimum = 0.0;
    double maximum = 0.0;
    double median = 0.0;
    double average = 0.0;
    int64_t count = 0;
    std::optional<double> std_dev;
    std::optional<double> skewness;  // bias-adjusted sample skewness
    std::optional<double> kurtosis;  // bias-adjusted sample excess kurtosis

    std::optional<double> get(StatName s) const;
};

// Throws DataError on empty input. Median of an even-sized sample is the
// midpoint of the two central order statistics.
AggregateStats compute_stats(std::span<const double> values);

}  // namespace anobench
