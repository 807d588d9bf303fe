#include "nanosim/noise.hpp"

#include "nanosim/errors.hpp"
#include "nanosim/fft.hpp"
#include "nanosim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace nanosim {

void NoiseConfig::validate() const {
    if (!(nsigma > 0.0) || !std::isfinite(nsigma)) throw ConfigError("nsigma", "must be > 0");
    if (n_harmonics < 1 || n_harmonics > 3) throw ConfigError("n_harmonics", "must lie in [1, 3]");
    if (colored && beta.empty()) throw ConfigError("beta", "colored noise needs at least one exponent");
    for (double b : beta)
        if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta", "exponents must be >= 0");
    if (ac_base_amp && !(*ac_base_amp >= 0.0)) throw ConfigError("ac_base_amp", "must be >= 0");
}

std::vector<double> white_noise(std::size_t n, double target_std, Rng& rng) {
    if (!(target_std >= 0.0)) throw ConfigError("target_std", "must be >= 0");
    const double a = std::sqrt(3.0) * target_std;
    std::vector<double> out(n);
    for (double& v : out) v = rng.uniform(-a, a);
    return out;
}

std::vector<double> ac_noise(std::size_t n, double sampfreq, double base_amp, int n_harmonics, Rng& rng) {
    if (n_harmonics < 1 || n_harmonics > 3) throw ConfigError("n_harmonics", "must lie in [1, 3]");
    if (!(sampfreq > 2.0 * kMainsFrequency * n_harmonics))
        throw ConfigError("sampfreq", "must exceed the Nyquist rate of the highest AC harmonic");
    std::vector<double> out(n, 0.0);
    for (int k = 1; k <= n_harmonics; ++k) {
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double amp = base_amp / static_cast<double>(k * k);
        const double omega = 2.0 * std::numbers::pi * kMainsFrequency * k / sampfreq;
        if (amp == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] += amp * std::sin(omega * static_cast<double>(i) + phase);
    }
    return out;
}

std::vector<double> colored_noise(std::size_t n, double beta, Rng& rng) {
    if (n < 2) throw ConfigError("n", "colored noise needs at least 2 samples");
    if (!(beta >= 0.0)) throw ConfigError("beta", "exponent must be >= 0");
    const std::size_t m = fft::smooth_size(n);
    std::vector<std::complex<double>> spectrum(m / 2 + 1);
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(m);
        const double scale = std::pow(f, -beta / 2.0);
        const double re = rng.normal() * scale;
        double im = rng.normal() * scale;
        // The Nyquist bin of an even-length real signal is real.
        if (m % 2 == 0 && k == m / 2) im = 0.0;
        spectrum[k] = {re, im};
    }
    auto series = fft::inverse(spectrum, m);
    series.resize(n);
    const double s = stddev(series);
    if (s > 0.0)
        for (double& v : series) v /= s;
    return series;
}

double reference_amplitude(std::span<const double> event_amplitudes, AmplitudeStrategy strategy) {
    if (event_amplitudes.empty()) throw ConfigError("event_amplitudes", "need at least one event amplitude");
    switch (strategy) {
        case AmplitudeStrategy::min_amplitude:
            return *std::min_element(event_amplitudes.begin(), event_amplitudes.end());
        case AmplitudeStrategy::max_amplitude:
            return *std::max_element(event_amplitudes.begin(), event_amplitudes.end());
        case AmplitudeStrategy::mean_amplitude:
            return mean(event_amplitudes);
    }
    return 0.0;
}

std::vector<double> compose_noise(std::span<const double> clean, const NoiseConfig& cfg,
                                  std::span<const double> event_amplitudes, double sampfreq, Rng& rng) {
    cfg.validate();
    if (!cfg.any_enabled()) throw ConfigError("nsigma", "nsigma is set but every noise component is disabled");
    const double reference = reference_amplitude(event_amplitudes, cfg.strategy);
    const std::size_t n = clean.size();

    const double clean_std = stddev(clean);
    const double premix = clean_std > 0.0 ? clean_std / 5.0 : 1.0;

    std::vector<double> total(n, 0.0);
    auto accumulate = [&](const std::vector<double>& part) {
        for (std::size_t i = 0; i < n; ++i) total[i] += part[i];
    };
    if (cfg.white) accumulate(white_noise(n, premix, rng));
    if (cfg.ac) accumulate(ac_noise(n, sampfreq, cfg.ac_base_amp.value_or(premix), cfg.n_harmonics, rng));
    if (cfg.colored && n >= 2)
        for (double b : cfg.beta) accumulate(colored_noise(n, b, rng));

    const double s = stddev(total);
    if (s == 0.0) {
        if (reference == 0.0) return total;
        throw ConfigError("nsigma", "enabled noise components produced a zero-variance signal");
    }
    const double gain = (reference / cfg.nsigma) / s;
    for (double& v : total) v *= gain;
    return total;
}

const char* to_string(AmplitudeStrategy s) {
    switch (s) {
        case AmplitudeStrategy::min_amplitude: return "min";
        case AmplitudeStrategy::max_amplitude: return "max";
        case AmplitudeStrategy::mean_amplitude: return "mean";
    }
    return "min";
}

AmplitudeStrategy parse_amplitude_strategy(const std::string& s) {
    if (s == "min" || s == "min_amplitude") return AmplitudeStrategy::min_amplitude;
    if (s == "max" || s == "max_amplitude") return AmplitudeStrategy::max_amplitude;
    if (s == "mean" || s == "mean_amplitude") return AmplitudeStrategy::mean_amplitude;
    throw ConfigError("strategy", "expected min, max or mean, got '" + s + "'");
}

}  // namespace nanosim
