#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "specklepuf/binary_key.hpp"
#include "specklepuf/hashing.hpp"
#include "specklepuf/metrics.hpp"
#include "specklepuf/optics.hpp"

namespace specklepuf {

inline constexpr int kReportFormatVersion = 1;

struct GaborSettings {
  int size = 17;
  double wavelength_px = 0.0;  // 0: twice the grain measured on the first fleet pattern
  double sigma_px = 0.0;       // 0: half the wavelength
  double orientation = 0.0;
  std::size_t stride = 1;

  bool operator==(const GaborSettings&) const = default;
};

/// Everything a fleet experiment depends on. Serialising it and running
/// again reproduces every artifact byte for byte.
struct RunConfig {
  std::uint64_t fleet_seed = 1;
  std::uint64_t challenge_seed = 7;
  std::uint64_t noise_seed = 11;
  std::size_t fleet_size = 50;
  std::size_t remeasure_count = 50;
  SurfaceParams surface;
  Dims challenge_dims{256, 256};
  OpticsConfig optics;
  JitterModel jitter;
  GaborSettings gabor;
  std::optional<double> threshold_override;
  std::string output_dir = "fleet_out";
  bool write_csv = true;
  bool write_keys = true;
  std::size_t workers = 0;  // 0: hardware concurrency

  /// Throws ParameterError listing every invalid field.
  void validate() const;
  bool operator==(const RunConfig&) const = default;

  /// Switch grids to the 1280x1024 camera format.
  void use_camera_scale();
};

nlohmann::json run_config_to_json(const RunConfig& config);
/// Missing fields keep their defaults; unknown fields are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

std::uint64_t token_seed(std::uint64_t fleet_seed, std::size_t index) noexcept;

/// Run fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct FleetResult {
  nlohmann::json report;
  GaborKernel kernel;
  std::vector<BinaryKey> fleet_keys;
  std::vector<BinaryKey> remeasure_keys;
  InterStats inter;
  std::optional<IntraStats> intra;
  double max_inter_correlation = 0.0;
  double min_intra_correlation = 1.0;
  double mean_entropy_x = 0.0;
  double mean_entropy_y = 0.0;
  std::optional<double> threshold;
};

/// Mint the fleet, render one shared challenge, hash, and compute inter
/// statistics, entropy and DoF; with remeasure_count >= 2 also intra
/// statistics of token 0, the fitted threshold and FAR/FRR. Writes
/// report.json (plus CSV and key files when enabled) under output_dir
/// unless `write_outputs` is false.
FleetResult run_fleet(const RunConfig& config, bool write_outputs = true);

struct DemoReport {
  std::size_t message_bytes = 0;
  bool bytes_equal = false;
  double bit_difference = 0.0;  // fraction of differing bits between input and output
  std::filesystem::path dictionary_path;
  std::filesystem::path ciphertext_path;
  std::filesystem::path decrypted_path;
  std::filesystem::path preview_path;

  nlohmann::json to_json() const;
};

/// Encrypt a PGM file with key A, hand the ciphertext over by file copy,
/// and decrypt it with key B and the public dictionary A ^ B. When
/// `decrypt_key` is given it replaces key B on the receiving side.
DemoReport demo_encrypt(const std::filesystem::path& image_path, const BinaryKey& key_a,
                        const BinaryKey& key_b, const std::filesystem::path& out_dir,
                        const std::optional<BinaryKey>& decrypt_key = std::nullopt);

/// Fraction of differing bits between two equal-length byte strings.
double bit_difference(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace specklepuf
