#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "anobench/errors.hpp"
#include "anobench/rng.hpp"
#include "anobench/stats.hpp"

using namespace anobench;

namespace {

// Independent reference: naive two-pass moments in long double, straight from
// the textbook definitions. Deliberately slow and structured nothing like the
// production implementation.
struct OracleStats {
    double minimum, maximum, median, average;
    int64_t count;
    std::optional<double> std_dev, skewness, kurtosis;
};

OracleStats oracle_stats(std::vector<double> v) {
    OracleStats o{};
    const size_t n = v.size();
    o.count = static_cast<int64_t>(n);
    std::sort(v.begin(), v.end());
    o.minimum = v.front();
    o.maximum = v.back();
    o.median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;

    long double sum = 0.0L;
    for (double x : v) sum += x;
    const long double mean = sum / static_cast<long double>(n);
    o.average = static_cast<double>(mean);

    long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
    for (double x : v) {
        long double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const auto nl = static_cast<long double>(n);
    m2 /= nl;
    m3 /= nl;
    m4 /= nl;

    if (n >= 2) o.std_dev = static_cast<double>(std::sqrt(m2 * nl / (nl - 1.0L)));
    if (m2 > 0.0L) {
        if (n >= 3) {
            long double g1 = m3 / std::pow(m2, 1.5L);
            o.skewness = static_cast<double>(g1 * std::sqrt(nl * (nl - 1.0L)) / (nl - 2.0L));
        }
        if (n >= 4) {
            long double g2 = m4 / (m2 * m2) - 3.0L;
            o.kurtosis = static_cast<double>(((nl + 1.0L) * g2 + 6.0L) * (nl - 1.0L) /
                                             ((nl - 2.0L) * (nl - 3.0L)));
        }
    }
    return o;
}

bool close(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

bool opt_close(const std::optional<double>& a, const std::optional<double>& b,
               double rel = 1e-9) {
    if (a.has_value() != b.has_value()) return false;
    return !a || close(*a, *b, rel);
}

std::vector<double> random_sample(Rng& rng, size_t n) {
    std::vector<double> v(n);
    switch (rng.uniform_int(4)) {
        case 0:  // uniform, moderate scale
            for (auto& x : v) x = rng.uniform(-100.0, 100.0);
            break;
        case 1:  // heavy-tailed positive (log-normal-ish response times)
            for (auto& x : v) x = std::exp(rng.uniform(0.0, 6.0));
            break;
        case 2:  // small integers (count-like, many ties)
            for (auto& x : v) x = static_cast<double>(rng.uniform_int(5));
            break;
        default:  // large offset, tiny spread (catastrophic for one-pass naive)
            for (auto& x : v) x = 1e9 + rng.uniform(0.0, 1.0);
            break;
    }
    return v;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(compute_stats({}), DataError);
}

TEST_CASE("known small samples") {
    auto s = compute_stats(std::vector<double>{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
    CHECK(s.count == 8);
    CHECK(s.minimum == 2.0);
    CHECK(s.maximum == 9.0);
    CHECK(s.median == doctest::Approx(4.5));
    CHECK(s.average == doctest::Approx(5.0));
    // population sd of this classic sample is 2; sample sd = 2 * sqrt(8/7)
    CHECK(*s.std_dev == doctest::Approx(2.0 * std::sqrt(8.0 / 7.0)));
}

TEST_CASE("median of an even-sized sample is the midpoint") {
    auto s = compute_stats(std::vector<double>{1.0, 2.0, 3.0, 10.0});
    CHECK(s.median == doctest::Approx(2.5));
}

TEST_CASE("sparse-count null rules") {
    auto s1 = compute_stats(std::vector<double>{42.0});
    CHECK(s1.count == 1);
    CHECK(s1.minimum == 42.0);
    CHECK(s1.average == 42.0);
    CHECK(!s1.std_dev);
    CHECK(!s1.skewness);
    CHECK(!s1.kurtosis);

    auto s2 = compute_stats(std::vector<double>{1.0, 3.0});
    CHECK(s2.std_dev.has_value());
    CHECK(!s2.skewness);
    CHECK(!s2.kurtosis);

    auto s3 = compute_stats(std::vector<double>{1.0, 2.0, 6.0});
    CHECK(s3.std_dev.has_value());
    CHECK(s3.skewness.has_value());
    CHECK(!s3.kurtosis);

    auto s4 = compute_stats(std::vector<double>{1.0, 2.0, 3.0, 10.0});
    CHECK(s4.kurtosis.has_value());
}

TEST_CASE("zero spread nulls the shape statistics") {
    auto s = compute_stats(std::vector<double>{5.0, 5.0, 5.0, 5.0, 5.0});
    CHECK(*s.std_dev == 0.0);
    CHECK(!s.skewness);
    CHECK(!s.kurtosis);
}

TEST_CASE("skewness sign follows the tail") {
    auto right = compute_stats(std::vector<double>{1.0, 1.0, 1.0, 2.0, 12.0});
    CHECK(*right.skewness > 0.0);
    auto left = compute_stats(std::vector<double>{-12.0, -2.0, -1.0, -1.0, -1.0});
    CHECK(*left.skewness < 0.0);
}

TEST_CASE("bias-adjusted values on a hand-checked sample") {
    // x = {1,2,3,4,100}: mean 22, m2 = 7610/5, m3 = 444600/5, m4 = 37604834/5
    auto s = compute_stats(std::vector<double>{1.0, 2.0, 3.0, 4.0, 100.0});
    double g1 = 88920.0 / std::pow(1522.0, 1.5);
    double G1 = g1 * std::sqrt(5.0 * 4.0) / 3.0;
    CHECK(*s.skewness == doctest::Approx(G1).epsilon(1e-12));
    double g2 = 7520966.8 / (1522.0 * 1522.0) - 3.0;
    double G2 = (6.0 * g2 + 6.0) * 4.0 / (3.0 * 2.0);
    CHECK(*s.kurtosis == doctest::Approx(G2).epsilon(1e-12));
}

TEST_CASE("matches the two-pass oracle on random samples") {
    Rng rng(0xabc123);
    for (int iter = 0; iter < 2000; ++iter) {
        size_t n = 1 + rng.uniform_int(1000);
        auto v = random_sample(rng, n);
        auto got = compute_stats(v);
        auto want = oracle_stats(v);
        REQUIRE(got.count == want.count);
        REQUIRE(close(got.minimum, want.minimum));
        REQUIRE(close(got.maximum, want.maximum));
        REQUIRE(close(got.median, want.median));
        REQUIRE(close(got.average, want.average));
        REQUIRE(opt_close(got.std_dev, want.std_dev));
        REQUIRE(opt_close(got.skewness, want.skewness, 1e-7));
        REQUIRE(opt_close(got.kurtosis, want.kurtosis, 1e-7));
    }
}

TEST_CASE("permutation invariance") {
    Rng rng(77);
    std::vector<double> v(257);
    for (auto& x : v) x = rng.uniform(0.0, 50.0);
    auto a = compute_stats(v);
    std::reverse(v.begin(), v.end());
    auto b = compute_stats(v);
    CHECK(a.average == b.average);
    CHECK(*a.std_dev == *b.std_dev);
    CHECK(*a.skewness == *b.skewness);
    CHECK(*a.kurtosis == *b.kurtosis);
    CHECK(a.median == b.median);
}

}  // TEST_SUITE
