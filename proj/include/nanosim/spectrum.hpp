#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nanosim {

struct Psd {
    std::vector<double> frequency;  ///< Hz
    std::vector<double> power;      ///< units^2 / Hz, one-sided

    double resolution() const { return frequency.size() > 1 ? frequency[1] - frequency[0] : 0.0; }
};

/// Welch estimate: periodic Hann window, per-segment mean removal, one-sided
/// density scaling. `overlap` is in samples and must be < segment_length.
Psd welch_psd(std::span<const double> signal, double sampfreq, std::size_t segment_length, std::size_t overlap);

/// Least-squares slope of log10(power) against log10(frequency) over the bins
/// with fmin <= f <= fmax (DC always excluded).
double loglog_slope(const Psd& psd, double fmin, double fmax);

}  // namespace nanosim
