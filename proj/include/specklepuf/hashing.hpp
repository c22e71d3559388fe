#pragma once

#include <complex>

#include "specklepuf/binary_key.hpp"
#include "specklepuf/grid.hpp"
#include "specklepuf/optics.hpp"

namespace specklepuf {

struct GaborKernel {
  int size = 17;  // odd, pixels per side
  double wavelength_px = 2.0;
  double sigma_px = 1.0;
  double orientation = 0.0;  // radians, carrier direction measured from +x

  void validate() const;
  bool operator==(const GaborKernel&) const = default;
};

using ComplexGrid = Grid<std::complex<double>>;

/// DC-corrected complex coefficients, indexed (row, col) with the centre
/// at (size / 2, size / 2).
ComplexGrid gabor_coefficients(const GaborKernel& kernel);

/// Same-size 2D convolution of the mean-subtracted intensity with the
/// kernel, borders mirrored without repeating the edge sample.
ComplexGrid gabor_filter(const Grid<double>& intensity, const GaborKernel& kernel);
ComplexGrid gabor_filter(const SpecklePattern& pattern, const GaborKernel& kernel);

/// Bit = 1 where Re(response) > 0. A stride > 1 keeps every stride-th
/// sample along each axis.
BinaryKey binarize(const ComplexGrid& response, std::size_t stride = 1);

BinaryKey hash_speckle(const SpecklePattern& pattern, const GaborKernel& kernel,
                       std::size_t stride = 1);

/// Mean speckle grain, the FWHM in pixels of the normalised intensity
/// autocorrelation averaged over both axes.
double estimate_grain_px(const Grid<double>& intensity);
double estimate_grain_px(const SpecklePattern& pattern);

/// Carrier period twice the grain (never below the 2 px Nyquist limit),
/// envelope sigma half the period.
GaborKernel kernel_for_grain(double grain_px, int size = 17, double orientation = 0.0);

Grid<double> to_intensity(const SpecklePattern& pattern);

}  // namespace specklepuf
