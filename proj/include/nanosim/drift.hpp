#pragma once

#include "nanosim/rng.hpp"

#include <cstddef>
#include <vector>

namespace nanosim {

struct DriftConfig {
    bool sinusoidal = false;
    std::int64_t numconcs = 4;   ///< concatenated sinusoid segments
    double maxamp = 1.0;         ///< nA
    int max_harmonic = 3;
    bool abrupt = false;
    std::int64_t nstepwins = 2;  ///< step windows
    double driftmaxmag = 1.0;    ///< nA
    std::int64_t maxnsteps = 3;  ///< sublevels per window, at most

    bool any_enabled() const { return sinusoidal || abrupt; }
    void validate() const;
};

/// Near-equal contiguous split of n samples; the first n % parts pieces are one longer.
std::vector<std::size_t> split_lengths(std::size_t n, std::size_t parts);

/// One segment: amplitude * sin(2 pi harmonic i / length), starting at phase 0.
std::vector<double> sinusoid_segment(std::size_t length, double amplitude, int harmonic);

/// `numconcs` concatenated sinusoids with amplitude U[0, maxamp] and harmonic
/// U{1..max_harmonic} of each segment's own length.
std::vector<double> sinusoidal_drift(std::size_t n, std::int64_t numconcs, double maxamp, Rng& rng,
                                     int max_harmonic = 3);

/// Piecewise-constant drift: `nstepwins` windows, each cut into 1..maxnsteps
/// sublevels with values U[-driftmaxmag, driftmaxmag].
std::vector<double> abrupt_drift(std::size_t n, std::int64_t nstepwins, double driftmaxmag, std::int64_t maxnsteps,
                                 Rng& rng);

}  // namespace nanosim
