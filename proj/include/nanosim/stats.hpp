#pragma once

#include <span>

namespace nanosim {

double mean(std::span<const double> x);

/// Population standard deviation (divides by n).
double stddev(std::span<const double> x);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nanosim
