#pragma once

#include <cstdint>
#include <string_view>

namespace specklepuf {

/// Identifier of the generator pinned into every descriptor and report.
inline constexpr std::string_view kGeneratorName = "splitmix64-counter-v1";

/// Independent named streams. Values are part of the on-disk contract:
/// changing them changes every simulated token.
enum class Stream : std::uint64_t {
  kHeight = 0x6865696768740001ULL,
  kChallenge = 0x6368616c6c000002ULL,
  kNoise = 0x6e6f697365000003ULL,
  kJitter = 0x6a69747465720004ULL,
  kKeys = 0x6b65797300000005ULL,
  kSelection = 0x73656c6563740006ULL,
};

/// Counter-based generator: output i of stream (seed, id) is
/// mix64(key + (i + 1) * golden), with key derived from (seed, id).
/// Outputs depend only on integer arithmetic and are identical on every
/// platform. Box-Muller normals rely on libm log/cos/sin.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream) noexcept;
  CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; caches the second variate.
  double normal() noexcept;

  /// Child generator whose key depends on this generator's key and `id`.
  CounterRng split(std::uint64_t id) const noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  struct FromKey {};
  CounterRng(FromKey, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace specklepuf
