#include <doctest.h>

#include "nanosim/errors.hpp"
#include "nanosim/filters.hpp"
#include "nanosim/rng.hpp"
#include "nanosim/stats.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace nanosim;

namespace {

std::vector<double> tone(std::size_t n, double freq, double fs) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
    return x;
}

double rms(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

// Plain circular convolution with modular indexing, for comparison.
std::vector<double> naive_circular(const std::vector<double>& x, const std::vector<double>& kernel) {
    const auto n = static_cast<std::int64_t>(x.size());
    const auto r = static_cast<std::int64_t>(kernel.size() / 2);
    std::vector<double> out(x.size(), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = -r; j <= r; ++j)
            out[static_cast<std::size_t>(i)] +=
                kernel[static_cast<std::size_t>(j + r)] * x[static_cast<std::size_t>(((i + j) % n + n) % n)];
    return out;
}

}  // namespace

TEST_CASE("RC step response follows the closed form") {
    for (double k : {0.05, 0.25, 1.0}) {
        std::vector<double> step(10000, 1.0);
        step[0] = 0.0;
        const auto y = rc_filter(step, k);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double expected = 1.0 - std::pow(1.0 - k, static_cast<double>(i));
            if (expected == 0.0)
                CHECK(y[i] == 0.0);
            else
                REQUIRE(std::abs(y[i] - expected) <= 1e-12 * std::abs(expected));
        }
    }
}

TEST_CASE("RC coefficient and stability guard") {
    CHECK(rc_coefficient(1.6e6, 1e-11, 250e3) == doctest::Approx(0.25));
    CHECK(rc_coefficient(1e6, 1.6e-11, 250e3) == doctest::Approx(0.25));
    std::vector<double> x{1, 2, 3};
    CHECK_THROWS_AS(rc_filter(x, 1.5), ConfigError);
    CHECK_THROWS_AS(rc_filter(x, 0.0), ConfigError);
    CHECK_THROWS_AS(rc_filter(x, -1.0, 1e-11, 1e5), ConfigError);
    // k = 1 passes the input straight through.
    CHECK(rc_filter(x, 1.0) == x);
}

TEST_CASE("RC decay flushes to exact zero instead of subnormals") {
    std::vector<double> x(5000, 0.0);
    x[0] = 1.0;
    const auto y = rc_filter(x, 0.5);
    for (double v : y) CHECK((v == 0.0 || std::abs(v) >= std::numeric_limits<double>::min()));
    CHECK(y.back() == 0.0);
}

TEST_CASE("Gaussian kernel is normalized and symmetric") {
    const auto k = gaussian_kernel(10e3, 250e3);
    CHECK(k.size() % 2 == 1);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
    CHECK_THROWS_AS(gaussian_kernel(0.0, 1000.0), ConfigError);
    CHECK_THROWS_AS(gaussian_kernel(500.0, 1000.0), ConfigError);
}

TEST_CASE("low-pass gain is -3 dB at cutoff and below -20 dB at three times cutoff") {
    const double fs = 250e3;
    // Each case covers a different kernel size, so both convolution paths are exercised.
    for (double cutoff : {10e3, 1e3, 40e3}) {
        const std::size_t n = 250000;  // whole cycles of every test tone
        const double at_cutoff = rms(gaussian_lowpass(tone(n, cutoff, fs), cutoff, fs)) / rms(tone(n, cutoff, fs));
        CHECK(at_cutoff == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
        const double above = rms(gaussian_lowpass(tone(n, 3 * cutoff, fs), cutoff, fs)) / rms(tone(n, 3 * cutoff, fs));
        CHECK(20.0 * std::log10(above) <= -20.0);
    }
}

TEST_CASE("low-pass equals a plain circular convolution on both paths") {
    Rng rng(6);
    for (double cutoff : {20e3, 800.0}) {
        std::vector<double> x(3000);
        for (double& v : x) v = rng.normal();
        const auto kernel = gaussian_kernel(cutoff, 250e3);
        const auto expected = naive_circular(x, kernel);
        const auto got = gaussian_lowpass(x, cutoff, 250e3);
        for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    }
    // Kernel wider than the signal wraps more than once.
    std::vector<double> tiny{1.0, 0.0, 0.0, 0.0, 0.0};
    const auto kernel = gaussian_kernel(2e3, 250e3);
    const auto got = gaussian_lowpass(tiny, 2e3, 250e3);
    const auto expected = naive_circular(tiny, kernel);
    for (std::size_t i = 0; i < tiny.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]));
}

TEST_CASE("low-pass preserves the mean") {
    Rng rng(7);
    std::vector<double> x(100000);
    for (double& v : x) v = 20.0 + rng.normal();
    for (double cutoff : {10e3, 500.0}) {
        const auto y = gaussian_lowpass(x, cutoff, 250e3);
        CHECK(std::abs(mean(y) - mean(x)) <= 1e-6 * std::abs(mean(x)));
    }
}

TEST_CASE("filter config validation") {
    FilterConfig cfg;
    CHECK_NOTHROW(cfg.validate(250e3));
    cfg.cutoff = 200e3;
    CHECK_THROWS_AS(cfg.validate(250e3), ConfigError);
    cfg = {};
    cfg.resistance = 1e3;  // dt/(RC) far above 1
    CHECK_THROWS_AS(cfg.validate(250e3), ConfigError);
}
