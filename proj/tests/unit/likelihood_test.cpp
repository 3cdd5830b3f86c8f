#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "anobench/errors.hpp"
#include "anobench/likelihood.hpp"
#include "anobench/rng.hpp"

using namespace anobench;

namespace {

// Gaussian upper tail by adaptive Simpson quadrature in long double —
// independent of erfc. phi decays below 1e-300 past |t| ~ 37, so a finite
// right limit is exact at double precision.
long double normal_pdf(long double t) {
    const long double inv_sqrt_2pi = 0.39894228040143267793994605993438L;
    return inv_sqrt_2pi * std::exp(-0.5L * t * t);
}

long double simpson(long double a, long double b, long double fa, long double fm,
                    long double fb, long double whole, int depth) {
    long double m = 0.5L * (a + b);
    long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    long double flm = normal_pdf(lm), frm = normal_pdf(rm);
    long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-19L) {
        return left + right + (left + right - whole) / 15.0L;
    }
    return simpson(a, m, fa, flm, fm, left, depth - 1) +
           simpson(m, b, fm, frm, fb, right, depth - 1);
}

double oracle_q(double x) {
    if (x < 0.0) return 1.0 - oracle_q(-x);
    long double a = x, b = 40.0L;
    long double fa = normal_pdf(a), fb = normal_pdf(b);
    long double m = 0.5L * (a + b);
    long double fm = normal_pdf(m);
    long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
    return static_cast<double>(simpson(a, b, fa, fm, fb, whole, 60));
}

// Straight-line recomputation from the full history at one index.
LikelihoodPoint oracle_point(const std::vector<double>& history, size_t t,
                             const LikelihoodParams& p) {
    const size_t seen = t + 1;
    const size_t w = std::min(seen, static_cast<size_t>(p.long_window));
    const size_t ws = std::min(seen, static_cast<size_t>(p.short_window));
    double mu = 0.0;
    for (size_t i = seen - w; i < seen; ++i) mu += history[i];
    mu /= static_cast<double>(w);
    double sq = 0.0;
    for (size_t i = seen - w; i < seen; ++i) sq += (history[i] - mu) * (history[i] - mu);
    double sigma = w >= 2 ? std::sqrt(sq / static_cast<double>(w - 1)) : 0.0;
    if (!(sigma > p.sigma_floor)) sigma = p.sigma_floor;
    double mu_s = 0.0;
    for (size_t i = seen - ws; i < seen; ++i) mu_s += history[i];
    mu_s /= static_cast<double>(ws);
    LikelihoodPoint point;
    point.mean_long = mu;
    point.std_long = sigma;
    point.mean_short = mu_s;
    point.likelihood = 1.0 - oracle_q((mu_s - mu) / sigma);
    point.warmup = seen < static_cast<size_t>(p.long_window);
    return point;
}

}  // namespace

TEST_SUITE("likelihood") {

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(LikelihoodParams{}.validate());
    CHECK_THROWS_AS((LikelihoodParams{1, 1, 0.5, 1e-9}.validate()), ConfigError);
    CHECK_THROWS_AS((LikelihoodParams{30, 0, 0.5, 1e-9}.validate()), ConfigError);
    CHECK_THROWS_AS((LikelihoodParams{30, 30, 0.5, 1e-9}.validate()), ConfigError);
    CHECK_THROWS_AS((LikelihoodParams{30, 2, 0.0, 1e-9}.validate()), ConfigError);
    CHECK_THROWS_AS((LikelihoodParams{30, 2, 1.0, 1e-9}.validate()), ConfigError);
    CHECK_THROWS_AS((LikelihoodParams{30, 2, 0.9, 0.0}.validate()), ConfigError);
}

TEST_CASE("tail probability matches the quadrature oracle") {
    CHECK(gaussian_tail_q(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // symmetry
    for (double x : {0.3, 1.7, 4.2}) {
        CHECK(gaussian_tail_q(x) + gaussian_tail_q(-x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int i = 0; i <= 1600; ++i) {
        double x = -8.0 + i * 0.01;
        REQUIRE(std::abs(gaussian_tail_q(x) - oracle_q(x)) <= 1e-12);
    }
    // deep tail stays relatively accurate too
    CHECK(gaussian_tail_q(6.0) == doctest::Approx(oracle_q(6.0)).epsilon(1e-9));
}

TEST_CASE("constant stream settles at one half") {
    AnomalyLikelihood model({30, 2, 0.9996, 1e-9});
    LikelihoodPoint last;
    for (int i = 0; i < 100; ++i) last = model.update(3.25);
    CHECK(last.likelihood == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(!last.warmup);
    CHECK(!classify(last, {30, 2, 0.9996, 1e-9}));
}

TEST_CASE("a level shift crosses the default threshold within two steps") {
    LikelihoodParams p{30, 2, 0.9996, 1e-9};
    AnomalyLikelihood model(p);
    for (int i = 0; i < 30; ++i) {
        auto pt = model.update(1.0 + 1e-4 * ((i % 2 == 0) ? 1.0 : -1.0));
        CHECK(!classify(pt, p));
    }
    auto s1 = model.update(100.0);
    auto s2 = model.update(100.0);
    bool crossed = classify(s1, p) || classify(s2, p);
    CHECK(crossed);
    CHECK(s2.likelihood >= p.threshold);
}

TEST_CASE("warmup points are never flagged") {
    LikelihoodParams p{30, 2, 0.9996, 1e-9};
    AnomalyLikelihood model(p);
    LikelihoodPoint pt;
    for (int i = 0; i < 28; ++i) {
        pt = model.update(1.0);
        CHECK(pt.warmup);
    }
    // enormous jump as the 29th point: one short of W, still suppressed
    pt = model.update(1e6);
    CHECK(pt.warmup);
    CHECK(!classify(pt, p));
    CHECK(pt.likelihood > 0.99);  // the likelihood itself does fire
}

TEST_CASE("streaming equals batch recomputation everywhere") {
    Rng rng(0x11fe);
    for (int run = 0; run < 50; ++run) {
        LikelihoodParams p;
        p.long_window = 2 + static_cast<int>(rng.uniform_int(40));
        p.short_window = 1 + static_cast<int>(rng.uniform_int(
                                 static_cast<uint64_t>(p.long_window - 1)));
        p.threshold = 0.999;
        p.sigma_floor = 1e-9;
        const size_t len = 5 + rng.uniform_int(200);
        std::vector<double> history(len);
        for (auto& x : history) {
            // mix smooth noise with occasional bursts and exact repeats
            double u = rng.uniform();
            x = u < 0.1 ? 50.0 * rng.uniform() : (u < 0.2 ? 1.0 : rng.normal());
        }
        AnomalyLikelihood model(p);
        for (size_t t = 0; t < len; ++t) {
            auto got = model.update(history[t]);
            auto want = oracle_point(history, t, p);
            REQUIRE(got.warmup == want.warmup);
            REQUIRE(got.mean_long == doctest::Approx(want.mean_long).epsilon(1e-12));
            REQUIRE(got.std_long == doctest::Approx(want.std_long).epsilon(1e-12));
            REQUIRE(got.mean_short == doctest::Approx(want.mean_short).epsilon(1e-12));
            REQUIRE(std::abs(got.likelihood - want.likelihood) <= 1e-9);
        }
    }
}

TEST_CASE("likelihood stays strictly inside the unit interval") {
    LikelihoodParams p{10, 1, 0.9996, 1e-9};
    AnomalyLikelihood model(p);
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        double x = i % 97 == 0 ? 1e12 : rng.uniform();
        auto pt = model.update(x);
        REQUIRE(pt.likelihood > 0.0);
        REQUIRE(pt.likelihood < 1.0);
    }
}

TEST_CASE("drop below baseline lowers the likelihood") {
    LikelihoodParams p{30, 2, 0.9996, 1e-9};
    AnomalyLikelihood model(p);
    LikelihoodPoint pt;
    Rng rng(4);
    for (int i = 0; i < 40; ++i) pt = model.update(10.0 + 0.1 * rng.normal());
    pt = model.update(0.0);
    pt = model.update(0.0);
    CHECK(pt.likelihood < 0.01);
}

}  // TEST_SUITE
