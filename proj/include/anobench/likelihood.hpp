#pragma once

#include <cstdint>
#include <vector>

namespace anobench {

// Gaussian upper-tail probability Q(x) = P(Z > x) = erfc(x / sqrt(2)) / 2.
double gaussian_tail_q(double x);

struct LikelihoodParams {
    int long_window = 30;      // W
    int short_window = 2;      // W', must be < W
    double threshold = 0.9996; // flag when L_t >= threshold
    double sigma_floor = 1e-9; // stands in for sigma on (near-)constant windows

    void validate() const;  // throws ConfigError
};

struct LikelihoodPoint {
    double likelihood = 0.5;  // L_t, strictly inside (0, 1)
    double mean_long = 0.0;   // mu_t
    double std_long = 0.0;    // sigma_t (after flooring)
    double mean_short = 0.0;  // mu~_t
    bool warmup = true;       // fewer than W points seen so far
};

// Rolling model of the reconstruction-error stream. The last W errors form a
// Gaussian baseline (mean mu_t, sample std sigma_t); the last W' errors give
// the short-term mean mu~_t; L_t = 1 - Q((mu~_t - mu_t) / sigma_t). During
// warmup both windows shrink to the available history.
class AnomalyLikelihood {
public:
    explicit AnomalyLikelihood(LikelihoodParams params);

    LikelihoodPoint update(double error);

    const LikelihoodParams& params() const { return params_; }
    size_t count() const { return count_; }

private:
    LikelihoodParams params_;
    std::vector<double> ring_;
    size_t next_ = 0;
    size_t count_ = 0;
};

// Threshold rule; warmup points are never flagged.
bool classify(const LikelihoodPoint& point, const LikelihoodParams& params);

}  // namespace anobench
