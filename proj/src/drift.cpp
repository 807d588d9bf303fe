#include "nanosim/drift.hpp"

#include "nanosim/errors.hpp"

#include <cmath>
#include <numbers>

namespace nanosim {

void DriftConfig::validate() const {
    if (sinusoidal) {
        if (numconcs < 1) throw ConfigError("numconcs", "must be >= 1");
        if (!(maxamp >= 0.0)) throw ConfigError("maxamp", "must be >= 0");
        if (max_harmonic < 1) throw ConfigError("max_harmonic", "must be >= 1");
    }
    if (abrupt) {
        if (nstepwins < 1) throw ConfigError("nstepwins", "must be >= 1");
        if (maxnsteps < 1) throw ConfigError("maxnsteps", "must be >= 1");
        if (!(driftmaxmag >= 0.0)) throw ConfigError("driftmaxmag", "must be >= 0");
    }
}

std::vector<std::size_t> split_lengths(std::size_t n, std::size_t parts) {
    std::vector<std::size_t> lengths(parts, n / parts);
    for (std::size_t i = 0; i < n % parts; ++i) ++lengths[i];
    return lengths;
}

std::vector<double> sinusoid_segment(std::size_t length, double amplitude, int harmonic) {
    std::vector<double> out(length);
    const double omega = 2.0 * std::numbers::pi * harmonic / static_cast<double>(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = amplitude * std::sin(omega * static_cast<double>(i));
    return out;
}

std::vector<double> sinusoidal_drift(std::size_t n, std::int64_t numconcs, double maxamp, Rng& rng,
                                     int max_harmonic) {
    if (numconcs < 1) throw ConfigError("numconcs", "must be >= 1");
    if (static_cast<std::size_t>(numconcs) > n) throw ConfigError("numconcs", "exceeds the signal length");
    if (!(maxamp >= 0.0)) throw ConfigError("maxamp", "must be >= 0");
    if (max_harmonic < 1) throw ConfigError("max_harmonic", "must be >= 1");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t len : split_lengths(n, static_cast<std::size_t>(numconcs))) {
        const double amp = rng.uniform(0.0, maxamp);
        const auto harmonic = static_cast<int>(rng.uniform_int(1, max_harmonic));
        const auto seg = sinusoid_segment(len, amp, harmonic);
        out.insert(out.end(), seg.begin(), seg.end());
    }
    return out;
}

std::vector<double> abrupt_drift(std::size_t n, std::int64_t nstepwins, double driftmaxmag, std::int64_t maxnsteps,
                                 Rng& rng) {
    if (nstepwins < 1) throw ConfigError("nstepwins", "must be >= 1");
    if (maxnsteps < 1) throw ConfigError("maxnsteps", "must be >= 1");
    if (!(driftmaxmag >= 0.0)) throw ConfigError("driftmaxmag", "must be >= 0");
    if (n / static_cast<std::size_t>(nstepwins) < static_cast<std::size_t>(maxnsteps))
        throw ConfigError("maxnsteps", "step windows are shorter than the sublevel count");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t win : split_lengths(n, static_cast<std::size_t>(nstepwins))) {
        const auto steps = static_cast<std::size_t>(rng.uniform_int(1, maxnsteps));
        for (std::size_t len : split_lengths(win, steps)) {
            const double level = rng.uniform(-driftmaxmag, driftmaxmag);
            out.insert(out.end(), len, level);
        }
    }
    return out;
}

}  // namespace nanosim
