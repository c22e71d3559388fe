#include "specklepuf/binary_key.hpp"

#include <bit>
#include <string>

#include "specklepuf/error.hpp"
#include "specklepuf/pgm.hpp"

namespace specklepuf {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

}  // namespace

BinaryKey::BinaryKey(Dims dims) : dims_(dims), words_((dims.size() + 63) / 64, 0) {}

void BinaryKey::set(std::size_t i, bool value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (63 - (i & 63));
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t BinaryKey::popcount() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

void BinaryKey::clear_padding() noexcept {
  const std::size_t tail = length() & 63;
  if (tail != 0 && !words_.empty()) words_.back() &= ~std::uint64_t{0} << (64 - tail);
}

BinaryKey BinaryKey::operator~() const {
  BinaryKey out = *this;
  for (std::uint64_t& w : out.words_) w = ~w;
  out.clear_padding();
  return out;
}

BinaryKey BinaryKey::operator^(const BinaryKey& other) const {
  BinaryKey out = *this;
  out ^= other;
  return out;
}

BinaryKey& BinaryKey::operator^=(const BinaryKey& other) {
  if (other.length() != length()) throw ParameterError("key length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::uint8_t BinaryKey::byte_at(std::size_t index) const noexcept {
  return static_cast<std::uint8_t>(words_[index >> 3] >> (56 - 8 * (index & 7)));
}

std::vector<std::uint8_t> BinaryKey::to_bytes() const {
  std::vector<std::uint8_t> out((length() + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = byte_at(i);
  return out;
}

BinaryKey BinaryKey::from_bytes(Dims dims, std::span<const std::uint8_t> bytes) {
  BinaryKey key(dims);
  if (bytes.size() != (key.length() + 7) / 8) throw FormatError("key payload has wrong size");
  for (std::size_t i = 0; i < bytes.size(); ++i)
    key.words_[i >> 3] |= static_cast<std::uint64_t>(bytes[i]) << (56 - 8 * (i & 7));
  const std::size_t tail = key.length() & 7;
  if (tail != 0 && (bytes.back() & (0xffu >> tail)) != 0)
    throw FormatError("key padding bits must be zero");
  return key;
}

std::vector<std::uint8_t> encode_key(const BinaryKey& key, std::array<char, 4> magic) {
  if (key.dims().rows > UINT32_MAX || key.dims().cols > UINT32_MAX)
    throw ParameterError("key dims exceed 32-bit header fields");
  std::vector<std::uint8_t> out(magic.begin(), magic.end());
  put_u32(out, kKeyFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(key.dims().rows));
  put_u32(out, static_cast<std::uint32_t>(key.dims().cols));
  const auto payload = key.to_bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

BinaryKey decode_key(std::span<const std::uint8_t> bytes, std::array<char, 4> magic) {
  if (bytes.size() < 16) throw FormatError("key file shorter than its header");
  for (std::size_t i = 0; i < 4; ++i)
    if (bytes[i] != static_cast<std::uint8_t>(magic[i]))
      throw FormatError(std::string("bad magic, expected ") + std::string(magic.begin(), magic.end()));
  if (get_u32(bytes, 4) != kKeyFormatVersion) throw FormatError("unsupported key format version");
  const Dims dims{get_u32(bytes, 8), get_u32(bytes, 12)};
  return BinaryKey::from_bytes(dims, bytes.subspan(16));
}

void write_key(const std::filesystem::path& path, const BinaryKey& key, std::array<char, 4> magic) {
  write_file_atomic(path, encode_key(key, magic));
}

BinaryKey read_key(const std::filesystem::path& path, std::array<char, 4> magic) {
  return decode_key(read_file(path), magic);
}

}  // namespace specklepuf
