#pragma once

#include "nanosim/benchmark.hpp"

#include <span>
#include <vector>

namespace nanosim {

/// Default baseline window in samples. Chains of 1000-point events at 10 %
/// density defeat a 2001-point window; longer windows follow slow 1/f wander
/// less closely.
inline constexpr std::size_t kDefaultDetectorWindow = 4001;

struct BaselineEstimate {
    std::vector<double> baseline;  ///< moving median
    std::vector<double> sigma;     ///< moving 1.4826 * MAD
};

struct BaselineOptions {
    /// Samples flagged here are left out of the statistics. Windows with fewer
    /// than a quarter of their samples left borrow from the nearest usable ones.
    const std::vector<bool>* exclude = nullptr;
    /// Raise an evaluation point to open-pore level when both neighbouring
    /// windows report a median higher by more than two sigma. Clusters of
    /// long downward events can fill most of one window and drag its median to
    /// the event level; a ramp is higher on one side only and is left alone.
    /// Local sigma is also capped at 1.5 times its median over the whole trace.
    bool dip_guard = false;
};

/// Median and robust sigma over a centred window, evaluated every window/8
/// samples and linearly interpolated in between.
BaselineEstimate moving_baseline(std::span<const double> signal, std::size_t window, const BaselineOptions& options = {});

/// Classical blockade detector.
///
/// A run of samples below baseline - k sigma triggers a detection. Its
/// boundaries are then moved to the half-depth crossings around the run, where
/// depth = baseline - run minimum; that depth is the reported amplitude.
/// Runs whose half-depth spans touch are merged. The baseline is estimated
/// twice more with the detected events masked out, so dense stretches of
/// events do not inflate the noise estimate or pull the baseline down.
std::vector<DetectionRecord> threshold_detector(std::span<const double> signal, std::size_t window, double k);

}  // namespace nanosim
