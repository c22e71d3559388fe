#include "specklepuf/optics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fft.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/rng.hpp"

namespace specklepuf {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMinGrid = 32;

std::string default_id(const char* prefix, std::uint64_t seed) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-%016llx", prefix, static_cast<unsigned long long>(seed));
  return buf;
}

bool same_aspect(Dims a, Dims b) noexcept { return a.rows * b.cols == b.rows * a.cols; }

Dims max_dims(Dims a, Dims b) noexcept {
  return {std::max(a.rows, b.rows), std::max(a.cols, b.cols)};
}

// Per-axis Fourier shift factor; the Nyquist bin of an even-length axis
// uses the real part so a real input stays real.
std::vector<Complex> shift_factors(std::size_t n, double shift) {
  std::vector<Complex> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) {
      f[k] = Complex(std::cos(std::numbers::pi * shift), 0.0);
    } else {
      f[k] = std::polar(1.0, -kTwoPi * detail::fft_frequency(k, n) * shift);
    }
  }
  return f;
}

Grid<double> bin_to_detector(const Grid<double>& intensity, Dims detector) {
  if (intensity.dims() == detector) return intensity;
  if (intensity.rows() % detector.rows != 0 || intensity.cols() % detector.cols != 0) {
    throw DimensionError("detector grid must divide the simulation grid evenly");
  }
  const std::size_t fr = intensity.rows() / detector.rows;
  const std::size_t fc = intensity.cols() / detector.cols;
  Grid<double> out(detector);
  for (std::size_t r = 0; r < intensity.rows(); ++r)
    for (std::size_t c = 0; c < intensity.cols(); ++c) out(r / fr, c / fc) += intensity(r, c);
  const double area = static_cast<double>(fr * fc);
  for (double& v : out.values()) v /= area;
  return out;
}

}  // namespace

void SurfaceParams::validate() const {
  if (grid.rows < kMinGrid || grid.cols < kMinGrid)
    throw ParameterError("grid_dims: must be at least 32x32");
  if (!(pitch_um > 0.0)) throw ParameterError("pitch: must be positive");
  if (!(correlation_length_um >= pitch_um))
    throw ParameterError("correlation_length: must be at least one pitch");
  if (!(rms_height_um > 0.0)) throw ParameterError("rms_height: must be positive");
  if (!(refractive_index > 1.0)) throw ParameterError("refractive_index: must exceed 1");
}

void OpticsConfig::validate() const {
  if (!(wavelength_um > 0.0)) throw ParameterError("wavelength: must be positive");
  if (!(z1_um >= 0.0)) throw ParameterError("z1: must be non-negative");
  if (!(z2_um >= 0.0)) throw ParameterError("z2: must be non-negative");
  if (detector.rows < kMinGrid || detector.cols < kMinGrid)
    throw ParameterError("detector_dims: must be at least 32x32");
  if (detector_bits != 8 && detector_bits != 12 && detector_bits != 16)
    throw ParameterError("detector_bits: must be 8, 12 or 16");
}

void JitterParams::validate(double max_shift_um) const {
  if (!std::isfinite(dx_um) || std::abs(dx_um) > max_shift_um)
    throw ParameterError("lateral_shift.dx: exceeds the configured maximum shift");
  if (!std::isfinite(dy_um) || std::abs(dy_um) > max_shift_um)
    throw ParameterError("lateral_shift.dy: exceeds the configured maximum shift");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma: must be non-negative");
}

void JitterModel::validate() const {
  if (!(shift_sigma_um >= 0.0)) throw ParameterError("shift_sigma: must be non-negative");
  if (!(max_shift_um >= 0.0)) throw ParameterError("max_shift: must be non-negative");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma: must be non-negative");
}

VirtualPuf mint_puf(std::uint64_t seed, const SurfaceParams& params) {
  return mint_puf(seed, params, default_id("puf", seed));
}

VirtualPuf mint_puf(std::uint64_t seed, const SurfaceParams& params, std::string puf_id) {
  params.validate();
  const Dims dims = params.grid;

  CounterRng rng(seed, Stream::kHeight);
  Grid<Complex> field(dims);
  for (Complex& v : field.values()) v = Complex(rng.normal(), 0.0);

  // Gaussian kernel of standard deviation `correlation_length`, applied as
  // its (periodic) transfer function.
  const double s = params.correlation_length_um / params.pitch_um;
  detail::fft2d(field, false);
  for (std::size_t r = 0; r < dims.rows; ++r) {
    const double fy = detail::fft_frequency(r, dims.rows);
    for (std::size_t c = 0; c < dims.cols; ++c) {
      const double fx = detail::fft_frequency(c, dims.cols);
      field(r, c) *= std::exp(-2.0 * std::numbers::pi * std::numbers::pi * s * s * (fx * fx + fy * fy));
    }
  }
  detail::fft2d(field, true);

  Grid<double> height(dims);
  double mean = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    height.storage()[i] = field.storage()[i].real();
    mean += height.storage()[i];
  }
  mean /= static_cast<double>(height.size());
  double ss = 0.0;
  for (double& h : height.values()) {
    h -= mean;
    ss += h * h;
  }
  const double sd = std::sqrt(ss / static_cast<double>(height.size() - 1));
  const double scale = sd > 0.0 ? params.rms_height_um / sd : 0.0;
  for (double& h : height.values()) h *= scale;

  return VirtualPuf{std::move(puf_id), seed, params, std::move(height)};
}

Challenge make_challenge(std::uint64_t seed, Dims dims) {
  return make_challenge(seed, dims, default_id("challenge", seed));
}

Challenge make_challenge(std::uint64_t seed, Dims dims, std::string challenge_id) {
  if (dims.rows == 0 || dims.cols == 0) throw ParameterError("dims: must be at least 1x1");
  CounterRng rng(seed, Stream::kChallenge);
  Grid<double> phase(dims);
  const double below_two_pi = std::nextafter(kTwoPi, 0.0);
  for (double& p : phase.values()) p = std::min(kTwoPi * rng.uniform(), below_two_pi);
  return Challenge{std::move(challenge_id), seed, dims, std::move(phase)};
}

JitterParams sample_jitter(const JitterModel& model, std::uint64_t seed, std::uint64_t trial) {
  model.validate();
  CounterRng rng = CounterRng(seed, Stream::kJitter).split(trial);
  double dx = model.shift_sigma_um * rng.normal();
  double dy = model.shift_sigma_um * rng.normal();
  const double mag = std::hypot(dx, dy);
  if (mag > model.max_shift_um) {
    dx *= model.max_shift_um / mag;
    dy *= model.max_shift_um / mag;
  }
  return JitterParams{dx, dy, model.noise_sigma, rng.next_u64()};
}

Grid<std::complex<double>> propagate_angular_spectrum(const Grid<Complex>& field, double pitch_um,
                                                      double wavelength_um, double z_um) {
  if (!(wavelength_um > 0.0)) throw ParameterError("wavelength: must be positive");
  if (!(pitch_um > 0.0)) throw ParameterError("pitch: must be positive");
  Grid<Complex> spectrum = field;
  if (z_um == 0.0) return spectrum;

  detail::fft2d(spectrum, false);
  const double inv_lambda_sq = 1.0 / (wavelength_um * wavelength_um);
  for (std::size_t r = 0; r < spectrum.rows(); ++r) {
    const double fy = detail::fft_frequency(r, spectrum.rows()) / pitch_um;
    for (std::size_t c = 0; c < spectrum.cols(); ++c) {
      const double fx = detail::fft_frequency(c, spectrum.cols()) / pitch_um;
      const double arg = inv_lambda_sq - fx * fx - fy * fy;
      if (arg <= 0.0) {
        spectrum(r, c) = 0.0;
      } else {
        spectrum(r, c) *= std::polar(1.0, kTwoPi * z_um * std::sqrt(arg));
      }
    }
  }
  detail::fft2d(spectrum, true);
  return spectrum;
}

Grid<double> fourier_shift(const Grid<double>& values, double dx_px, double dy_px) {
  Grid<Complex> spectrum(values.dims());
  for (std::size_t i = 0; i < values.size(); ++i) spectrum.storage()[i] = values.storage()[i];
  detail::fft2d(spectrum, false);
  const auto fr = shift_factors(values.rows(), dy_px);
  const auto fc = shift_factors(values.cols(), dx_px);
  for (std::size_t r = 0; r < values.rows(); ++r)
    for (std::size_t c = 0; c < values.cols(); ++c) spectrum(r, c) *= fr[r] * fc[c];
  detail::fft2d(spectrum, true);
  Grid<double> out(values.dims());
  for (std::size_t i = 0; i < out.size(); ++i) out.storage()[i] = spectrum.storage()[i].real();
  return out;
}

Grid<double> roll(const Grid<double>& values, long dx_px, long dy_px) {
  const auto rows = static_cast<long>(values.rows());
  const auto cols = static_cast<long>(values.cols());
  Grid<double> out(values.dims());
  for (long r = 0; r < rows; ++r) {
    const long sr = ((r - dy_px) % rows + rows) % rows;
    for (long c = 0; c < cols; ++c) {
      const long sc = ((c - dx_px) % cols + cols) % cols;
      out(r, c) = values(sr, sc);
    }
  }
  return out;
}

template <typename T>
Grid<T> upsample_nearest(const Grid<T>& src, Dims target) {
  if (src.dims() == target) return src;
  if (!same_aspect(src.dims(), target))
    throw DimensionError("grids with different aspect ratios cannot be resampled");
  if (target.rows < src.rows() || target.cols < src.cols())
    throw DimensionError("nearest-neighbour resampling only upsamples");
  Grid<T> out(target);
  for (std::size_t r = 0; r < target.rows; ++r) {
    const std::size_t sr = r * src.rows() / target.rows;
    for (std::size_t c = 0; c < target.cols; ++c) out(r, c) = src(sr, c * src.cols() / target.cols);
  }
  return out;
}

template Grid<double> upsample_nearest(const Grid<double>&, Dims);
template Grid<std::uint16_t> upsample_nearest(const Grid<std::uint16_t>&, Dims);

double total_power(const Grid<Complex>& field) noexcept {
  double sum = 0.0;
  for (const Complex& v : field.values()) sum += std::norm(v);
  return sum;
}

Grid<double> render_intensity(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics) {
  return render_intensity(puf, challenge, optics, 0.0, 0.0);
}

Grid<double> render_intensity(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics, double dx_um, double dy_um) {
  optics.validate();
  const Dims token = puf.height_um.dims();
  if (token.size() == 0 || challenge.phase.dims().size() == 0)
    throw DimensionError("token and challenge grids must be non-empty");
  if (!same_aspect(token, challenge.phase.dims()) || !same_aspect(token, optics.detector))
    throw DimensionError("challenge, token and detector grids must share one aspect ratio");

  const Dims sim = max_dims(max_dims(token, challenge.phase.dims()), optics.detector);
  const double pitch = puf.params.pitch_um * static_cast<double>(token.cols) /
                       static_cast<double>(sim.cols);

  Grid<double> height = puf.height_um;
  if (dx_um != 0.0 || dy_um != 0.0)
    height = fourier_shift(height, dx_um / puf.params.pitch_um, dy_um / puf.params.pitch_um);
  height = upsample_nearest(height, sim);
  const Grid<double> phase = upsample_nearest(challenge.phase, sim);

  Grid<Complex> field(sim);
  for (std::size_t i = 0; i < field.size(); ++i) field.storage()[i] = std::polar(1.0, phase.storage()[i]);
  field = propagate_angular_spectrum(field, pitch, optics.wavelength_um, optics.z1_um);

  const double k_delta = kTwoPi / optics.wavelength_um * (puf.params.refractive_index - 1.0);
  for (std::size_t i = 0; i < field.size(); ++i)
    field.storage()[i] *= std::polar(1.0, k_delta * height.storage()[i]);
  field = propagate_angular_spectrum(field, pitch, optics.wavelength_um, optics.z2_um);

  Grid<double> intensity(sim);
  for (std::size_t i = 0; i < field.size(); ++i) intensity.storage()[i] = std::norm(field.storage()[i]);
  return bin_to_detector(intensity, optics.detector);
}

Grid<std::uint16_t> quantize(const Grid<double>& intensity, int bits, double noise_sigma,
                             std::uint64_t noise_seed) {
  if (bits < 1 || bits > 16) throw ParameterError("detector_bits: must be within 1..16");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma: must be non-negative");
  const double full = static_cast<double>((1u << bits) - 1u);
  double peak = 0.0;
  for (double v : intensity.values()) peak = std::max(peak, v);

  CounterRng rng(noise_seed, Stream::kNoise);
  Grid<std::uint16_t> out(intensity.dims());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    double x = peak > 0.0 ? intensity.storage()[i] / peak : 0.0;
    if (noise_sigma > 0.0) x = std::clamp(x + noise_sigma * rng.normal(), 0.0, 1.0);
    out.storage()[i] = static_cast<std::uint16_t>(std::floor(x * full + 0.5));
  }
  return out;
}

SpecklePattern render_speckle(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics) {
  Grid<double> intensity = render_intensity(puf, challenge, optics);
  return SpecklePattern{optics.detector, optics.detector_bits,
                        quantize(intensity, optics.detector_bits), puf.puf_id,
                        challenge.challenge_id, ""};
}

SpecklePattern remeasure(const VirtualPuf& puf, const Challenge& challenge,
                         const OpticsConfig& optics, const JitterParams& jitter,
                         double max_shift_um) {
  jitter.validate(max_shift_um);
  Grid<double> intensity = render_intensity(puf, challenge, optics, jitter.dx_um, jitter.dy_um);
  char desc[160] = "";
  if (!jitter.is_identity()) {
    std::snprintf(desc, sizeof desc, "dx=%.6g um, dy=%.6g um, noise=%.6g, noise_seed=%llu",
                  jitter.dx_um, jitter.dy_um, jitter.noise_sigma,
                  static_cast<unsigned long long>(jitter.noise_seed));
  }
  return SpecklePattern{optics.detector, optics.detector_bits,
                        quantize(intensity, optics.detector_bits, jitter.noise_sigma, jitter.noise_seed),
                        puf.puf_id, challenge.challenge_id, desc};
}

}  // namespace specklepuf
