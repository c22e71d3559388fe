#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "specklepuf/grid.hpp"

namespace specklepuf {

/// Statistical description of a token surface. Lengths are in micrometres.
struct SurfaceParams {
  Dims grid{256, 256};
  double pitch_um = 2.0;
  double correlation_length_um = 8.0;
  double rms_height_um = 0.5;
  double refractive_index = 1.5;

  /// Throws ParameterError naming the first offending field.
  void validate() const;
  bool operator==(const SurfaceParams&) const = default;
};

/// Simulated token. The height map is a pure function of (seed, params).
struct VirtualPuf {
  std::string puf_id;
  std::uint64_t seed = 0;
  SurfaceParams params;
  Grid<double> height_um;
};

/// Phase pattern shown on the modulator, radians in [0, 2pi).
struct Challenge {
  std::string challenge_id;
  std::uint64_t seed = 0;
  Dims dims;
  Grid<double> phase;
};

struct OpticsConfig {
  double wavelength_um = 0.6328;
  double z1_um = 5.0e4;  // modulator plane to token plane
  double z2_um = 5.0e4;  // token plane to detector plane
  Dims detector{256, 256};
  int detector_bits = 8;

  void validate() const;
  std::uint32_t max_count() const noexcept { return (1u << detector_bits) - 1u; }
  bool operator==(const OpticsConfig&) const = default;
};

/// One remeasurement's misalignment and detector noise.
struct JitterParams {
  double dx_um = 0.0;
  double dy_um = 0.0;
  double noise_sigma = 0.0;  // fraction of full scale
  std::uint64_t noise_seed = 0;

  void validate(double max_shift_um) const;
  bool is_identity() const noexcept { return dx_um == 0.0 && dy_um == 0.0 && noise_sigma == 0.0; }
};

/// Distribution that remeasurement campaigns draw JitterParams from.
/// Defaults are calibrated so repeat readings of one token correlate
/// above 0.97 and keep intra-HD near 0.02.
struct JitterModel {
  double shift_sigma_um = 0.1;  // per axis
  double max_shift_um = 1.0;    // slot precision bound; shifts are clipped to this radius
  double noise_sigma = 0.002;

  void validate() const;
  bool operator==(const JitterModel&) const = default;
};

struct SpecklePattern {
  Dims dims;
  int bits = 8;
  Grid<std::uint16_t> counts;
  std::string puf_id;
  std::string challenge_id;
  std::string jitter;  // human-readable descriptor, empty when unjittered
};

VirtualPuf mint_puf(std::uint64_t seed, const SurfaceParams& params);
VirtualPuf mint_puf(std::uint64_t seed, const SurfaceParams& params, std::string puf_id);

Challenge make_challenge(std::uint64_t seed, Dims dims);
Challenge make_challenge(std::uint64_t seed, Dims dims, std::string challenge_id);

/// Deterministic jitter for remeasurement `trial` of a campaign seeded by `seed`.
JitterParams sample_jitter(const JitterModel& model, std::uint64_t seed, std::uint64_t trial);

/// Detector-plane intensity |u|^2 before normalisation and quantisation.
Grid<double> render_intensity(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics);
Grid<double> render_intensity(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics, double dx_um, double dy_um);

SpecklePattern render_speckle(const VirtualPuf& puf, const Challenge& challenge,
                              const OpticsConfig& optics);

SpecklePattern remeasure(const VirtualPuf& puf, const Challenge& challenge,
                         const OpticsConfig& optics, const JitterParams& jitter,
                         double max_shift_um = JitterModel{}.max_shift_um);

/// Map [0, peak] linearly onto [0, 2^bits - 1] with round-half-up. When
/// noise_sigma > 0, seeded Gaussian noise in full-scale units is added and
/// the result clipped to [0, 1] before quantisation.
Grid<std::uint16_t> quantize(const Grid<double>& intensity, int bits, double noise_sigma = 0.0,
                             std::uint64_t noise_seed = 0);

// Lower-level pieces, exposed for verification.

/// Exact scalar free-space propagation over `z_um` on a periodic grid.
/// Evanescent components (spatial frequency above 1/lambda) are dropped.
Grid<std::complex<double>> propagate_angular_spectrum(const Grid<std::complex<double>>& field,
                                                      double pitch_um, double wavelength_um,
                                                      double z_um);

/// Periodic sub-pixel translation by (dx, dy) pixels through the Fourier
/// shift theorem. Positive dx moves content towards larger column index.
Grid<double> fourier_shift(const Grid<double>& values, double dx_px, double dy_px);

/// Periodic whole-pixel translation with the same sign convention.
Grid<double> roll(const Grid<double>& values, long dx_px, long dy_px);

/// Nearest-neighbour upsampling; aspect ratios must match.
template <typename T>
Grid<T> upsample_nearest(const Grid<T>& src, Dims target);

double total_power(const Grid<std::complex<double>>& field) noexcept;

}  // namespace specklepuf
