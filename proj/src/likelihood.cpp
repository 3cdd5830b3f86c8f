#include "anobench/likelihood.hpp"

#include <cmath>

#include "anobench/errors.hpp"

namespace anobench {

double gaussian_tail_q(double x) {
    return 0.5 * std::erfc(x * 0.7071067811865475244008443621048);  // x / sqrt(2)
}

void LikelihoodParams::validate() const {
    if (long_window < 2) {
        throw ConfigError("long_window must be >= 2");
    }
    if (short_window < 1 || short_window >= long_window) {
        throw ConfigError("short_window must lie in [1, long_window)");
    }
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
    }
    if (!(sigma_floor > 0.0)) {
        throw ConfigError("sigma_floor must be positive");
    }
}

AnomalyLikelihood::AnomalyLikelihood(LikelihoodParams params) : params_(params) {
    params_.validate();
    ring_.assign(static_cast<size_t>(params_.long_window), 0.0);
}

LikelihoodPoint AnomalyLikelihood::update(double error) {
    ring_[next_] = error;
    next_ = (next_ + 1) % ring_.size();
    if (count_ < ring_.size()) ++count_;

    const size_t w = count_;  // long window, shrunk during warmup
    const size_t ws = std::min(static_cast<size_t>(params_.short_window), w);

    // Ring slot of the i-th most recent value (i = 0 is the newest).
    auto recent = [this](size_t i) {
        return ring_[(next_ + ring_.size() - 1 - i) % ring_.size()];
    };

    double sum = 0.0;
    for (size_t i = 0; i < w; ++i) sum += recent(i);
    const double mu = sum / static_cast<double>(w);

    double sq = 0.0;
    for (size_t i = 0; i < w; ++i) {
        const double d = recent(i) - mu;
        sq += d * d;
    }
    double sigma =
        w >= 2 ? std::sqrt(sq / static_cast<double>(w - 1)) : 0.0;
    if (!(sigma > params_.sigma_floor)) sigma = params_.sigma_floor;

    double short_sum = 0.0;
    for (size_t i = 0; i < ws; ++i) short_sum += recent(i);
    const double mu_short = short_sum / static_cast<double>(ws);

    LikelihoodPoint point;
    point.mean_long = mu;
    point.std_long = sigma;
    point.mean_short = mu_short;
    point.likelihood = 1.0 - gaussian_tail_q((mu_short - mu) / sigma);
    point.warmup = count_ < ring_.size();
    return point;
}

bool classify(const LikelihoodPoint& point, const LikelihoodParams& params) {
    return !point.warmup && point.likelihood >= params.threshold;
}

}  // namespace anobench
