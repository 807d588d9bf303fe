#include "nanosim/spectrum.hpp"

#include "nanosim/errors.hpp"
#include "nanosim/fft.hpp"
#include "nanosim/stats.hpp"

#include <cmath>
#include <numbers>

namespace nanosim {

Psd welch_psd(std::span<const double> signal, double sampfreq, std::size_t segment_length, std::size_t overlap) {
    if (!(sampfreq > 0.0)) throw ConfigError("sampfreq", "must be > 0");
    if (segment_length < 2) throw ConfigError("segment_length", "must be >= 2");
    if (overlap >= segment_length) throw ConfigError("overlap", "must be smaller than the segment length");
    if (signal.size() < segment_length) throw ConfigError("segment_length", "exceeds the signal length");

    std::vector<double> window(segment_length);
    double window_power = 0.0;
    for (std::size_t i = 0; i < segment_length; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(segment_length));
        window_power += window[i] * window[i];
    }

    const std::size_t step = segment_length - overlap;
    const std::size_t segments = (signal.size() - segment_length) / step + 1;
    const std::size_t bins = segment_length / 2 + 1;
    Psd psd;
    psd.power.assign(bins, 0.0);
    std::vector<double> buffer(segment_length);
    for (std::size_t s = 0; s < segments; ++s) {
        const auto seg = signal.subspan(s * step, segment_length);
        const double m = mean(seg);
        for (std::size_t i = 0; i < segment_length; ++i) buffer[i] = (seg[i] - m) * window[i];
        const auto spectrum = fft::forward(buffer);
        for (std::size_t k = 0; k < bins; ++k) psd.power[k] += std::norm(spectrum[k]);
    }
    const double scale = 1.0 / (sampfreq * window_power * static_cast<double>(segments));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool unpaired = k == 0 || (segment_length % 2 == 0 && k == bins - 1);
        psd.power[k] *= scale * (unpaired ? 1.0 : 2.0);
    }
    psd.frequency.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
        psd.frequency[k] = static_cast<double>(k) * sampfreq / static_cast<double>(segment_length);
    return psd;
}

double loglog_slope(const Psd& psd, double fmin, double fmax) {
    std::vector<double> lx, ly;
    for (std::size_t k = 1; k < psd.frequency.size(); ++k) {
        const double f = psd.frequency[k];
        if (f < fmin || f > fmax || !(psd.power[k] > 0.0)) continue;
        lx.push_back(std::log10(f));
        ly.push_back(std::log10(psd.power[k]));
    }
    if (lx.size() < 2) throw ConfigError("fmin", "fewer than two PSD bins in the fit range");
    return fit_line(lx, ly).slope;
}

}  // namespace nanosim
