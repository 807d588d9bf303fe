#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nanosim::fft {

/// Forward real transform; returns n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> forward(std::span<const double> x);

/// Inverse of `forward` for a length-n signal, scaled by 1/n so that
/// inverse(forward(x), n) == x.
std::vector<double> inverse(std::span<const std::complex<double>> bins, std::size_t n);

/// Smallest m >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t smooth_size(std::size_t n);

}  // namespace nanosim::fft
