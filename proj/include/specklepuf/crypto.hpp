#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "specklepuf/binary_key.hpp"

namespace specklepuf {

/// XOR of two private keys; publishing it reveals neither key alone.
struct PublicDictionary {
  BinaryKey bits;
  std::string key_a_id;
  std::string key_b_id;

  std::string id() const { return key_a_id + "^" + key_b_id; }
};

/// Run of key bytes [key_byte_offset, key_byte_offset + length) used for
/// the matching run of payload bytes.
struct KeyChunk {
  std::uint64_t key_byte_offset = 0;
  std::uint64_t length = 0;

  bool operator==(const KeyChunk&) const = default;
};

struct Ciphertext {
  std::vector<std::uint8_t> payload;
  std::uint64_t message_length = 0;
  std::uint32_t challenge_index = 0;
  std::string key_id;
  std::string dict_id;
  std::vector<KeyChunk> chunks;

  bool operator==(const Ciphertext&) const = default;
};

inline constexpr std::array<char, 4> kCiphertextMagic = {'B', 'P', 'U', 'C'};
inline constexpr std::uint32_t kCiphertextFormatVersion = 1;

PublicDictionary build_dictionary(const BinaryKey& key_a, const BinaryKey& key_b,
                                  std::string key_a_id = "A", std::string key_b_id = "B");

/// One-shot pad: c = m XOR K(A) over the first 8 |m| key bits.
/// Throws CapacityError when 8 |m| exceeds the key length.
Ciphertext encrypt(std::span<const std::uint8_t> message, const BinaryKey& key_a,
                   std::string key_id = "A");

/// K(B) XOR D XOR c.
std::vector<std::uint8_t> decrypt(const Ciphertext& cipher, const BinaryKey& key_b,
                                  const PublicDictionary& dict);

/// XOR the payload with the sender key again; recovers the plaintext.
std::vector<std::uint8_t> unpad(const Ciphertext& cipher, const BinaryKey& key_a);

/// Sender-side pad with a usage cursor. Successive messages consume
/// successive key bytes; a key byte is never used twice.
class KeyPad {
 public:
  KeyPad(BinaryKey key, std::string key_id, std::uint64_t used_bytes = 0);

  Ciphertext encrypt(std::span<const std::uint8_t> message, std::uint32_t challenge_index = 0);

  std::uint64_t used_bytes() const noexcept { return used_bytes_; }
  std::uint64_t capacity_bytes() const noexcept { return key_.length() / 8; }
  std::uint64_t remaining_bytes() const noexcept { return capacity_bytes() - used_bytes_; }
  const std::string& key_id() const noexcept { return key_id_; }

  /// Cursor persistence as a small JSON document.
  void save_cursor(const std::filesystem::path& path) const;
  static std::uint64_t load_cursor(const std::filesystem::path& path, const std::string& key_id);

 private:
  BinaryKey key_;
  std::string key_id_;
  std::uint64_t used_bytes_ = 0;
};

std::vector<std::uint8_t> encode_ciphertext(const Ciphertext& cipher);
Ciphertext decode_ciphertext(std::span<const std::uint8_t> bytes);

void write_dictionary(const std::filesystem::path& path, const PublicDictionary& dict);
PublicDictionary read_dictionary(const std::filesystem::path& path);

}  // namespace specklepuf
