#pragma once

#include <span>
#include <vector>

namespace nanosim {

struct FilterConfig {
    bool rc_enabled = true;
    double resistance = 1.0e6;      ///< ohms
    double capacitance = 1.6e-11;   ///< farads
    bool lpf_enabled = true;
    double cutoff = 10.0e3;         ///< Hz, -3 dB point of the Gaussian low-pass

    void validate(double sampfreq) const;
};

/// Forward-Euler gain dt / (R C) of the discretised RC response.
double rc_coefficient(double resistance, double capacitance, double sampfreq);

/// First-order RC response: out[0] = in[0], out[i+1] = out[i] + k (in[i+1] - out[i]).
/// Rejects k > 1, where the recurrence overshoots.
std::vector<double> rc_filter(std::span<const double> input, double resistance, double capacitance,
                              double sampfreq);
std::vector<double> rc_filter(std::span<const double> input, double k);

/// Zero-phase Gaussian smoothing with unit DC gain and gain 1/sqrt(2) at `cutoff`.
/// The kernel is truncated at 6 sigma, renormalised and applied circularly.
std::vector<double> gaussian_lowpass(std::span<const double> input, double cutoff, double sampfreq);

/// Truncated, unit-sum Gaussian kernel (length 2r+1) used by gaussian_lowpass.
std::vector<double> gaussian_kernel(double cutoff, double sampfreq);

}  // namespace nanosim
