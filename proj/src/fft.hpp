#pragma once

#include <complex>

#include "specklepuf/grid.hpp"

namespace specklepuf::detail {

/// In-place unnormalized 2D DFT. `inverse` applies the 1/N scale so a
/// forward/inverse pair is the identity.
void fft2d(Grid<std::complex<double>>& data, bool inverse);

/// Signed frequency in cycles per sample for DFT bin k of n.
double fft_frequency(std::size_t k, std::size_t n) noexcept;

}  // namespace specklepuf::detail
