#include "anobench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "anobench/errors.hpp"

namespace anobench {

std::optional<double> AggregateStats::get(StatName s) const {
    switch (s) {
        case StatName::Minimum: return minimum;
        case StatName::Maximum: return maximum;
        case StatName::Median: return median;
        case StatName::Average: return average;
        case StatName::Count: return static_cast<double>(count);
        case StatName::StdDev: return std_dev;
        case StatName::Skewness: return skewness;
        case StatName::Kurtosis: return kurtosis;
    }
    return std::nullopt;
}

AggregateStats compute_stats(std::span<const double> values) {
    if (values.empty()) {
        throw DataError("compute_stats on empty sample");
    }
    const size_t n = values.size();
    const double dn = static_cast<double>(n);

    AggregateStats out;
    out.count = static_cast<int64_t>(n);

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    out.minimum = sorted.front();
    out.maximum = sorted.back();
    out.median = n % 2 == 1 ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    // All sums run over the sorted copy so the result is bitwise independent
    // of the input order (groups accumulate values in arrival order).
    double sum = 0.0;
    for (double v : sorted) sum += v;
    const double mean0 = sum / dn;
    // Corrected two-pass: carry the first-pass residual as a separate term
    // instead of folding it into the mean, where it would be quantized away
    // when the magnitude dwarfs the spread.
    double residual = 0.0;
    for (double v : sorted) residual += v - mean0;
    const double correction = residual / dn;
    out.average = mean0 + correction;

    if (n < 2) return out;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double d = (v - mean0) - correction;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;

    const double variance = m2 * dn / (dn - 1.0);
    out.std_dev = std::sqrt(variance);

    if (m2 <= 0.0) {
        // Zero spread: the moment ratios are 0/0, reported as null.
        return out;
    }

    if (n >= 3) {
        const double g1 = m3 / std::pow(m2, 1.5);
        out.skewness = g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
    }
    if (n >= 4) {
        const double ratio = m4 / (m2 * m2);
        out.kurtosis = (dn - 1.0) / ((dn - 2.0) * (dn - 3.0)) *
                       ((dn + 1.0) * ratio - 3.0 * (dn - 1.0));
    }
    return out;
}

}  // namespace anobench
