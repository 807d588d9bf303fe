#include <doctest.h>

#include "nanosim/errors.hpp"
#include "nanosim/noise.hpp"
#include "nanosim/spectrum.hpp"
#include "nanosim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

using namespace nanosim;

namespace {

// Amplitude of the tone at `freq` from a direct projection; exact when the record holds whole cycles.
double tone_amplitude(const std::vector<double>& x, double freq, double fs) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double phase = 2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs;
        acc += x[i] * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

double ensemble_slope(double beta, int traces, std::size_t n) {
    Psd avg;
    Rng rng(1000 + static_cast<std::uint64_t>(beta * 10));
    for (int t = 0; t < traces; ++t) {
        const auto x = colored_noise(n, beta, rng);
        auto psd = welch_psd(x, 1.0, 4096, 2048);
        if (avg.power.empty()) {
            avg = psd;
        } else {
            for (std::size_t k = 0; k < psd.power.size(); ++k) avg.power[k] += psd.power[k];
        }
    }
    return loglog_slope(avg, 4.0 / 4096.0, 0.25);
}

}  // namespace

TEST_CASE("white noise hits its target standard deviation") {
    Rng rng(1);
    const auto x = white_noise(1000000, 1.0, rng);
    CHECK(stddev(x) >= 0.997);
    CHECK(stddev(x) <= 1.003);
    const double a = std::sqrt(3.0);
    CHECK(*std::max_element(x.begin(), x.end()) <= a);
    CHECK(*std::min_element(x.begin(), x.end()) >= -a);

    const auto zero = white_noise(100, 0.0, rng);
    CHECK(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("AC harmonics fall off as 1/k^2 in amplitude") {
    const double fs = 10000.0;
    Rng rng(2);
    const auto x = ac_noise(10000, fs, 1.0, 3, rng);
    const double a1 = tone_amplitude(x, 50, fs), a2 = tone_amplitude(x, 100, fs), a3 = tone_amplitude(x, 150, fs);
    CHECK(a1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a2 * a2 / (a1 * a1) == doctest::Approx(1.0 / 16.0).epsilon(1e-6));
    CHECK(a3 * a3 / (a1 * a1) == doctest::Approx(1.0 / 81.0).epsilon(1e-6));
    CHECK(tone_amplitude(x, 200, fs) < 1e-9);

    const auto single = ac_noise(10000, fs, 2.0, 1, rng);
    CHECK(tone_amplitude(single, 50, fs) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(tone_amplitude(single, 100, fs) < 1e-9);

    const auto off = ac_noise(64, fs, 0.0, 3, rng);
    CHECK(std::all_of(off.begin(), off.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("AC noise refuses harmonics above Nyquist") {
    Rng rng(3);
    CHECK_THROWS_AS(ac_noise(100, 300.0, 1.0, 3, rng), ConfigError);
    CHECK_NOTHROW(ac_noise(100, 301.0, 1.0, 3, rng));
    CHECK_THROWS_AS(ac_noise(100, 1000.0, 1.0, 4, rng), ConfigError);
}

TEST_CASE("colored noise has unit std and the requested spectral slope") {
    Rng rng(4);
    for (std::size_t n : {std::size_t{2}, std::size_t{1001}, std::size_t{65536}, std::size_t{99991}}) {
        const auto x = colored_noise(n, 1.2, rng);
        REQUIRE(x.size() == n);
        CHECK(stddev(x) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(ensemble_slope(0.0, 64, 1 << 15) == doctest::Approx(0.0).epsilon(0.1));
    CHECK(std::abs(ensemble_slope(1.2, 64, 1 << 15) + 1.2) <= 0.15);
    CHECK(std::abs(ensemble_slope(2.0, 64, 1 << 15) + 2.0) <= 0.15);
}

TEST_CASE("reference amplitude strategies") {
    const std::vector<double> amps{2.0, 4.0, 6.0};
    CHECK(reference_amplitude(amps, AmplitudeStrategy::min_amplitude) == 2.0);
    CHECK(reference_amplitude(amps, AmplitudeStrategy::max_amplitude) == 6.0);
    CHECK(reference_amplitude(amps, AmplitudeStrategy::mean_amplitude) == 4.0);
    CHECK_THROWS_AS(reference_amplitude({}, AmplitudeStrategy::min_amplitude), ConfigError);
}

TEST_CASE("composed noise is rescaled to reference / nsigma") {
    std::vector<double> clean(20000, 0.0);
    for (std::size_t i = 1000; i < 1100; ++i) clean[i] = -3.0;
    struct Case {
        AmplitudeStrategy strategy;
        std::vector<double> amps;
        double nsigma;
        double expected_std;
    };
    const std::vector<Case> cases{{AmplitudeStrategy::min_amplitude, {3, 3, 3}, 3.0, 1.0},
                                  {AmplitudeStrategy::min_amplitude, {3, 5}, 7.0, 3.0 / 7.0},
                                  {AmplitudeStrategy::max_amplitude, {2, 4}, 2.0, 2.0},
                                  {AmplitudeStrategy::mean_amplitude, {2, 4}, 2.0, 1.5}};
    for (const auto& c : cases) {
        NoiseConfig cfg;
        cfg.strategy = c.strategy;
        cfg.nsigma = c.nsigma;
        Rng rng(9);
        const auto noise = compose_noise(clean, cfg, c.amps, 250000.0, rng);
        CHECK(stddev(noise) == doctest::Approx(c.expected_std).epsilon(1e-9));
    }
}

TEST_CASE("each component alone can carry the whole noise budget") {
    std::vector<double> clean(5000, 0.0);
    clean[10] = -1.0;
    for (int mask = 1; mask < 8; ++mask) {
        NoiseConfig cfg;
        cfg.white = mask & 1;
        cfg.ac = mask & 2;
        cfg.colored = mask & 4;
        cfg.nsigma = 4.0;
        Rng rng(static_cast<std::uint64_t>(mask));
        CHECK(stddev(compose_noise(clean, cfg, std::vector<double>{2.0}, 250000.0, rng)) ==
              doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("all components disabled is a configuration error") {
    NoiseConfig cfg;
    cfg.white = cfg.ac = cfg.colored = false;
    Rng rng(1);
    std::vector<double> clean(10, 0.0);
    CHECK_THROWS_AS(compose_noise(clean, cfg, std::vector<double>{1.0}, 1000.0, rng), ConfigError);
}

TEST_CASE("noise config validation") {
    NoiseConfig cfg;
    cfg.nsigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.n_harmonics = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.beta = {-1.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(parse_amplitude_strategy("max") == AmplitudeStrategy::max_amplitude);
    CHECK_THROWS_AS(parse_amplitude_strategy("median"), ConfigError);
}
