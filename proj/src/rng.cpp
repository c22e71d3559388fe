#include "specklepuf/rng.hpp"

#include <cmath>
#include <numbers>

namespace specklepuf {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream) noexcept
    : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_(mix64(mix64(seed) ^ mix64(stream_id + kGolden))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

CounterRng CounterRng::split(std::uint64_t id) const noexcept {
  return CounterRng(FromKey{}, mix64(key_ ^ mix64(id * kGolden + 1)));
}

}  // namespace specklepuf
