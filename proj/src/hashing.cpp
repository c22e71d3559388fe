#include "specklepuf/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "specklepuf/error.hpp"

namespace specklepuf {

namespace {

// Reflect about the edge sample: -1 -> 1, n -> n - 2.
inline long mirror(long i, long n) noexcept {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

double half_width(const Grid<double>& acf, bool along_cols) {
  const std::size_t n = along_cols ? acf.cols() : acf.rows();
  double prev = 1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double cur = along_cols ? acf(0, k) : acf(k, 0);
    if (cur < 0.5) return static_cast<double>(k - 1) + (prev - 0.5) / (prev - cur);
    prev = cur;
  }
  return static_cast<double>(n / 2);
}

}  // namespace

void GaborKernel::validate() const {
  if (size < 3 || size % 2 == 0) throw ParameterError("size: must be odd and at least 3");
  if (!(wavelength_px > 0.0)) throw ParameterError("wavelength_px: must be positive");
  if (!(sigma_px > 0.0)) throw ParameterError("sigma_px: must be positive");
  if (!std::isfinite(orientation)) throw ParameterError("orientation: must be finite");
}

ComplexGrid gabor_coefficients(const GaborKernel& kernel) {
  kernel.validate();
  const auto n = static_cast<std::size_t>(kernel.size);
  const int half = kernel.size / 2;
  const double ct = std::cos(kernel.orientation);
  const double st = std::sin(kernel.orientation);

  ComplexGrid k(Dims{n, n});
  std::complex<double> sum = 0.0;
  for (int r = 0; r < kernel.size; ++r) {
    const double y = r - half;
    for (int c = 0; c < kernel.size; ++c) {
      const double x = c - half;
      const double xr = x * ct + y * st;
      const double yr = -x * st + y * ct;
      const double envelope = std::exp(-(xr * xr + yr * yr) / (2.0 * kernel.sigma_px * kernel.sigma_px));
      k(r, c) = std::polar(envelope, 2.0 * std::numbers::pi * xr / kernel.wavelength_px);
      sum += k(r, c);
    }
  }
  const std::complex<double> mean = sum / static_cast<double>(k.size());
  for (auto& v : k.values()) v -= mean;
  return k;
}

ComplexGrid gabor_filter(const Grid<double>& intensity, const GaborKernel& kernel) {
  kernel.validate();
  const auto ks = static_cast<std::size_t>(kernel.size);
  if (ks >= intensity.rows() || ks >= intensity.cols())
    throw ParameterError("kernel: size must be smaller than the image");

  const ComplexGrid coeffs = gabor_coefficients(kernel);
  std::vector<double> kre(coeffs.size()), kim(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    kre[i] = coeffs.storage()[i].real();
    kim[i] = coeffs.storage()[i].imag();
  }

  double mean = 0.0;
  for (double v : intensity.values()) mean += v;
  mean /= static_cast<double>(intensity.size());

  // Mirror-padded, mean-subtracted copy.
  const long rows = static_cast<long>(intensity.rows());
  const long cols = static_cast<long>(intensity.cols());
  const long half = kernel.size / 2;
  const long prow = rows + 2 * half;
  const long pcol = cols + 2 * half;
  std::vector<double> padded(static_cast<std::size_t>(prow * pcol));
  for (long r = 0; r < prow; ++r) {
    const long sr = mirror(r - half, rows);
    for (long c = 0; c < pcol; ++c)
      padded[static_cast<std::size_t>(r * pcol + c)] = intensity(sr, mirror(c - half, cols)) - mean;
  }

  ComplexGrid out(intensity.dims());
  const long k = kernel.size;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      // out(r, c) = sum_{a,b} K(a, b) * x(r + half - a, c + half - b)
      for (long a = 0; a < k; ++a) {
        const double* row = &padded[static_cast<std::size_t>((r + k - 1 - a) * pcol + c + k - 1)];
        const double* kr = &kre[static_cast<std::size_t>(a * k)];
        const double* ki = &kim[static_cast<std::size_t>(a * k)];
        for (long b = 0; b < k; ++b) {
          const double x = row[-b];
          re += kr[b] * x;
          im += ki[b] * x;
        }
      }
      out(r, c) = {re, im};
    }
  }
  return out;
}

Grid<double> to_intensity(const SpecklePattern& pattern) {
  Grid<double> g(pattern.counts.dims());
  for (std::size_t i = 0; i < g.size(); ++i) g.storage()[i] = pattern.counts.storage()[i];
  return g;
}

ComplexGrid gabor_filter(const SpecklePattern& pattern, const GaborKernel& kernel) {
  return gabor_filter(to_intensity(pattern), kernel);
}

BinaryKey binarize(const ComplexGrid& response, std::size_t stride) {
  if (stride == 0) throw ParameterError("stride: must be at least 1");
  const Dims dims{(response.rows() + stride - 1) / stride, (response.cols() + stride - 1) / stride};
  BinaryKey key(dims);
  for (std::size_t r = 0; r < dims.rows; ++r)
    for (std::size_t c = 0; c < dims.cols; ++c)
      key.set(r, c, response(r * stride, c * stride).real() > 0.0);
  return key;
}

BinaryKey hash_speckle(const SpecklePattern& pattern, const GaborKernel& kernel, std::size_t stride) {
  return binarize(gabor_filter(pattern, kernel), stride);
}

double estimate_grain_px(const Grid<double>& intensity) {
  if (intensity.rows() < 2 || intensity.cols() < 2)
    throw ParameterError("intensity: need at least 2x2 samples");
  double mean = 0.0;
  for (double v : intensity.values()) mean += v;
  mean /= static_cast<double>(intensity.size());

  ComplexGrid power(intensity.dims());
  for (std::size_t i = 0; i < power.size(); ++i) power.storage()[i] = intensity.storage()[i] - mean;
  detail::fft2d(power, false);
  for (auto& v : power.values()) v = std::norm(v);
  detail::fft2d(power, true);

  const double zero_lag = power(0, 0).real();
  if (!(zero_lag > 0.0)) throw ParameterError("intensity: constant image has no grain");
  Grid<double> acf(intensity.dims());
  for (std::size_t i = 0; i < acf.size(); ++i) acf.storage()[i] = power.storage()[i].real() / zero_lag;

  return half_width(acf, true) + half_width(acf, false);  // 2 * mean half-width
}

double estimate_grain_px(const SpecklePattern& pattern) { return estimate_grain_px(to_intensity(pattern)); }

GaborKernel kernel_for_grain(double grain_px, int size, double orientation) {
  if (!(grain_px > 0.0)) throw ParameterError("grain: must be positive");
  const double wavelength = std::max(2.0, 2.0 * grain_px);
  return GaborKernel{size, wavelength, wavelength / 2.0, orientation};
}

}  // namespace specklepuf
