#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "specklepuf/grid.hpp"

namespace specklepuf {

/// Row-major bit array. Bit i lives in word i / 64 at position
/// 63 - i % 64, so serialising words big-endian yields bytes packed
/// MSB-first. Padding bits past `length()` are always zero.
class BinaryKey {
 public:
  BinaryKey() = default;
  explicit BinaryKey(Dims dims);
  /// One-dimensional key of `length` bits.
  explicit BinaryKey(std::size_t length) : BinaryKey(Dims{1, length}) {}

  Dims dims() const noexcept { return dims_; }
  std::size_t length() const noexcept { return dims_.size(); }
  bool empty() const noexcept { return length() == 0; }

  bool bit(std::size_t i) const noexcept { return (words_[i >> 6] >> (63 - (i & 63))) & 1u; }
  bool bit(std::size_t r, std::size_t c) const noexcept { return bit(r * dims_.cols + c); }
  void set(std::size_t i, bool value) noexcept;
  void set(std::size_t r, std::size_t c, bool value) noexcept { set(r * dims_.cols + c, value); }

  std::size_t popcount() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  BinaryKey operator~() const;
  BinaryKey operator^(const BinaryKey& other) const;
  BinaryKey& operator^=(const BinaryKey& other);
  bool operator==(const BinaryKey&) const = default;

  /// ceil(L / 8) bytes, MSB-first, zero-padded.
  std::vector<std::uint8_t> to_bytes() const;
  static BinaryKey from_bytes(Dims dims, std::span<const std::uint8_t> bytes);

  /// Byte `index` of the MSB-first packing.
  std::uint8_t byte_at(std::size_t index) const noexcept;

 private:
  void clear_padding() noexcept;

  Dims dims_;
  std::vector<std::uint64_t> words_;
};

/// Four-byte magics of the 16-byte bit-array container.
inline constexpr std::array<char, 4> kKeyMagic = {'B', 'P', 'U', 'F'};
inline constexpr std::array<char, 4> kDictionaryMagic = {'B', 'P', 'U', 'D'};
inline constexpr std::uint32_t kKeyFormatVersion = 1;

/// Header: magic, version, rows, cols (u32 little-endian), then the packed bits.
std::vector<std::uint8_t> encode_key(const BinaryKey& key, std::array<char, 4> magic = kKeyMagic);
BinaryKey decode_key(std::span<const std::uint8_t> bytes, std::array<char, 4> magic = kKeyMagic);

void write_key(const std::filesystem::path& path, const BinaryKey& key,
               std::array<char, 4> magic = kKeyMagic);
BinaryKey read_key(const std::filesystem::path& path, std::array<char, 4> magic = kKeyMagic);

}  // namespace specklepuf
