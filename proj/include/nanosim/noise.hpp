#pragma once

#include "nanosim/rng.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nanosim {

/// Which event amplitude the noise level is referenced to.
enum class AmplitudeStrategy { min_amplitude, max_amplitude, mean_amplitude };

/// Mains frequency of the synthesized AC interference.
inline constexpr double kMainsFrequency = 50.0;

struct NoiseConfig {
    /// Reference event amplitude divided by the standard deviation of the noise.
    double nsigma = 5.0;
    AmplitudeStrategy strategy = AmplitudeStrategy::min_amplitude;
    std::vector<double> beta{1.2};
    int n_harmonics = 3;
    bool white = true;
    bool ac = true;
    bool colored = true;
    /// Pre-mix AC amplitude; defaults to a fifth of the clean-signal std.
    std::optional<double> ac_base_amp;

    bool any_enabled() const { return white || ac || colored; }
    void validate() const;
};

/// I.i.d. uniform samples on [-sqrt(3) s, sqrt(3) s], population std s.
std::vector<double> white_noise(std::size_t n, double target_std, Rng& rng);

/// Sum over k = 1..n_harmonics of (base_amp / k^2) sin(2 pi 50 k t + phi_k), random phases.
std::vector<double> ac_noise(std::size_t n, double sampfreq, double base_amp, int n_harmonics, Rng& rng);

/// Power-law noise with PSD ~ f^-beta, unit sample standard deviation.
///
/// Fourier-domain synthesis: every positive frequency gets independent Gaussian
/// real and imaginary parts scaled by f^(-beta/2); the DC term is zero. The
/// spectrum is built on the next 7-smooth length >= n and truncated to n.
std::vector<double> colored_noise(std::size_t n, double beta, Rng& rng);

double reference_amplitude(std::span<const double> event_amplitudes, AmplitudeStrategy strategy);

/// Mixes the enabled components, then rescales so that
/// std(noise) = reference_amplitude / nsigma.
std::vector<double> compose_noise(std::span<const double> clean, const NoiseConfig& cfg,
                                  std::span<const double> event_amplitudes, double sampfreq, Rng& rng);

const char* to_string(AmplitudeStrategy s);
AmplitudeStrategy parse_amplitude_strategy(const std::string& s);

}  // namespace nanosim
