#include "nanosim/filters.hpp"

#include "nanosim/errors.hpp"
#include "nanosim/fft.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace nanosim {

void FilterConfig::validate(double sampfreq) const {
    if (rc_enabled) {
        if (!(resistance > 0.0)) throw ConfigError("resistance", "must be > 0");
        if (!(capacitance > 0.0)) throw ConfigError("capacitance", "must be > 0");
        if (rc_coefficient(resistance, capacitance, sampfreq) > 1.0)
            throw ConfigError("resistance", "dt/(RC) exceeds 1; the RC recurrence would be unstable");
    }
    if (lpf_enabled && !(cutoff > 0.0 && cutoff < sampfreq / 2.0))
        throw ConfigError("cutoff", "must lie in (0, sampfreq/2)");
}

double rc_coefficient(double resistance, double capacitance, double sampfreq) {
    return 1.0 / (sampfreq * resistance * capacitance);
}

std::vector<double> rc_filter(std::span<const double> input, double k) {
    if (!(k > 0.0)) throw ConfigError("resistance", "dt/(RC) must be > 0");
    if (k > 1.0) throw ConfigError("resistance", "dt/(RC) exceeds 1; the RC recurrence would be unstable");
    std::vector<double> out(input.size());
    if (input.empty()) return out;
    out[0] = input[0];
    for (std::size_t i = 1; i < input.size(); ++i) {
        const double y = out[i - 1] + k * (input[i] - out[i - 1]);
        // A long decay towards zero ends in subnormals, which make every later stage crawl.
        out[i] = std::abs(y) < std::numeric_limits<double>::min() ? 0.0 : y;
    }
    return out;
}

std::vector<double> rc_filter(std::span<const double> input, double resistance, double capacitance,
                              double sampfreq) {
    if (!(resistance > 0.0)) throw ConfigError("resistance", "must be > 0");
    if (!(capacitance > 0.0)) throw ConfigError("capacitance", "must be > 0");
    if (!(sampfreq > 0.0)) throw ConfigError("sampfreq", "must be > 0");
    return rc_filter(input, rc_coefficient(resistance, capacitance, sampfreq));
}

std::vector<double> gaussian_kernel(double cutoff, double sampfreq) {
    if (!(sampfreq > 0.0)) throw ConfigError("sampfreq", "must be > 0");
    if (!(cutoff > 0.0 && cutoff < sampfreq / 2.0)) throw ConfigError("cutoff", "must lie in (0, sampfreq/2)");
    // Amplitude response |H(f)| = exp(-f^2 / (2 sf^2)). Pinning H(cutoff) = 1/sqrt(2)
    // gives sf = cutoff / sqrt(ln 2); the sqrt(2 ln 2) form would put cutoff at -6 dB.
    const double sigma_f = cutoff / std::sqrt(std::numbers::ln2);
    const double sigma_samples = sampfreq / (2.0 * std::numbers::pi * sigma_f);
    const auto radius = static_cast<std::size_t>(std::ceil(6.0 * sigma_samples));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        const double t = static_cast<double>(i) - static_cast<double>(radius);
        kernel[i] = std::exp(-0.5 * t * t / (sigma_samples * sigma_samples));
        sum += kernel[i];
    }
    for (double& v : kernel) v /= sum;
    return kernel;
}

namespace {

constexpr std::size_t kDirectRadiusLimit = 128;

std::vector<double> circular_direct(std::span<const double> x, const std::vector<double>& kernel) {
    const std::size_t n = x.size();
    const std::size_t r = kernel.size() / 2;
    std::vector<double> out(n, 0.0);
    auto wrapped = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) {
            // x[(i + j - r) mod n] without signed arithmetic.
            const std::size_t idx = (i + j + n * (r / n + 1) - r) % n;
            acc += kernel[j] * x[idx];
        }
        return acc;
    };
    if (n <= 2 * r) {
        for (std::size_t i = 0; i < n; ++i) out[i] = wrapped(i);
        return out;
    }
    for (std::size_t i = 0; i < r; ++i) out[i] = wrapped(i);
    for (std::size_t i = r; i < n - r; ++i) {
        const double* base = x.data() + (i - r);
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) acc += kernel[j] * base[j];
        out[i] = acc;
    }
    for (std::size_t i = n - r; i < n; ++i) out[i] = wrapped(i);
    return out;
}

std::vector<double> circular_fft(std::span<const double> x, const std::vector<double>& kernel) {
    const std::size_t n = x.size();
    // Fold the kernel onto a length-n circle, then multiply spectra.
    std::vector<double> folded(n, 0.0);
    const std::size_t r = kernel.size() / 2;
    for (std::size_t j = 0; j < kernel.size(); ++j) {
        const std::size_t idx = (j + n * (r / n + 1) - r) % n;
        folded[idx] += kernel[j];
    }
    auto xs = fft::forward(x);
    const auto ks = fft::forward(folded);
    for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= ks[k];
    return fft::inverse(xs, n);
}

}  // namespace

std::vector<double> gaussian_lowpass(std::span<const double> input, double cutoff, double sampfreq) {
    const auto kernel = gaussian_kernel(cutoff, sampfreq);
    if (input.empty()) return {};
    if (kernel.size() / 2 <= kDirectRadiusLimit) return circular_direct(input, kernel);
    return circular_fft(input, kernel);
}

}  // namespace nanosim
