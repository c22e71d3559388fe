#include "specklepuf/crypto.hpp"

#include "json.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/pgm.hpp"

namespace specklepuf {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::string str() {
    const auto n = le<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> rest() const { return b_.subspan(pos_); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw FormatError("ciphertext: truncated header");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
  if (s.size() > UINT16_MAX) throw ParameterError("identifier longer than 65535 bytes");
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

Ciphertext xor_with_key(std::span<const std::uint8_t> message, const BinaryKey& key, std::uint64_t offset,
                        std::string key_id, std::uint32_t challenge_index) {
  Ciphertext c;
  c.message_length = message.size();
  c.challenge_index = challenge_index;
  c.key_id = std::move(key_id);
  c.payload.resize(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) c.payload[i] = message[i] ^ key.byte_at(offset + i);
  if (!message.empty()) c.chunks.push_back({offset, message.size()});
  return c;
}

void check_chunks(const Ciphertext& cipher, std::uint64_t capacity_bytes) {
  if (cipher.payload.size() != cipher.message_length)
    throw ParameterError("ciphertext: payload size differs from recorded message length");
  std::uint64_t covered = 0;
  for (const auto& ch : cipher.chunks) {
    if (ch.key_byte_offset > capacity_bytes || ch.length > capacity_bytes - ch.key_byte_offset)
      throw ParameterError("ciphertext: chunk extends past the key");
    covered += ch.length;
  }
  if (covered != cipher.payload.size()) throw ParameterError("ciphertext: chunk map does not cover the payload");
}

}  // namespace

PublicDictionary build_dictionary(const BinaryKey& key_a, const BinaryKey& key_b, std::string key_a_id,
                                  std::string key_b_id) {
  if (key_a.length() != key_b.length()) throw ParameterError("dictionary: key lengths differ");
  return PublicDictionary{key_a ^ key_b, std::move(key_a_id), std::move(key_b_id)};
}

Ciphertext encrypt(std::span<const std::uint8_t> message, const BinaryKey& key_a, std::string key_id) {
  if (message.size() > key_a.length() / 8)
    throw CapacityError("message needs " + std::to_string(8 * message.size()) + " key bits, key holds " +
                        std::to_string(key_a.length()));
  return xor_with_key(message, key_a, 0, std::move(key_id), 0);
}

std::vector<std::uint8_t> decrypt(const Ciphertext& cipher, const BinaryKey& key_b, const PublicDictionary& dict) {
  if (key_b.length() != dict.bits.length()) throw ParameterError("decrypt: key and dictionary lengths differ");
  if (!cipher.dict_id.empty() && !dict.key_a_id.empty() && cipher.dict_id != dict.id())
    throw ParameterError("decrypt: ciphertext was produced for dictionary " + cipher.dict_id);
  check_chunks(cipher, key_b.length() / 8);

  std::vector<std::uint8_t> m(cipher.payload.size());
  std::size_t at = 0;
  for (const auto& ch : cipher.chunks) {
    for (std::uint64_t i = 0; i < ch.length; ++i, ++at) {
      const std::uint64_t kb = ch.key_byte_offset + i;
      m[at] = static_cast<std::uint8_t>(key_b.byte_at(kb) ^ dict.bits.byte_at(kb) ^ cipher.payload[at]);
    }
  }
  return m;
}

std::vector<std::uint8_t> unpad(const Ciphertext& cipher, const BinaryKey& key_a) {
  check_chunks(cipher, key_a.length() / 8);
  std::vector<std::uint8_t> m(cipher.payload.size());
  std::size_t at = 0;
  for (const auto& ch : cipher.chunks)
    for (std::uint64_t i = 0; i < ch.length; ++i, ++at)
      m[at] = static_cast<std::uint8_t>(key_a.byte_at(ch.key_byte_offset + i) ^ cipher.payload[at]);
  return m;
}

KeyPad::KeyPad(BinaryKey key, std::string key_id, std::uint64_t used_bytes)
    : key_(std::move(key)), key_id_(std::move(key_id)), used_bytes_(used_bytes) {
  if (used_bytes_ > capacity_bytes()) throw ParameterError("pad cursor lies past the end of the key");
}

Ciphertext KeyPad::encrypt(std::span<const std::uint8_t> message, std::uint32_t challenge_index) {
  if (message.size() > remaining_bytes())
    throw CapacityError("key " + key_id_ + " has " + std::to_string(remaining_bytes()) +
                        " unused bytes, message needs " + std::to_string(message.size()));
  Ciphertext c = xor_with_key(message, key_, used_bytes_, key_id_, challenge_index);
  used_bytes_ += message.size();
  return c;
}

void KeyPad::save_cursor(const std::filesystem::path& path) const {
  const nlohmann::json doc = {{"format_version", 1}, {"key_id", key_id_}, {"used_bytes", used_bytes_}};
  const std::string text = doc.dump(2) + "\n";
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t KeyPad::load_cursor(const std::filesystem::path& path, const std::string& key_id) {
  if (!std::filesystem::exists(path)) return 0;
  const auto bytes = read_file(path);
  try {
    const auto doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    if (doc.at("key_id").get<std::string>() != key_id)
      throw ParameterError("cursor file belongs to key " + doc.at("key_id").get<std::string>());
    return doc.at("used_bytes").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cursor file: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_ciphertext(const Ciphertext& cipher) {
  std::vector<std::uint8_t> out(kCiphertextMagic.begin(), kCiphertextMagic.end());
  put_le<std::uint32_t>(out, kCiphertextFormatVersion);
  put_le<std::uint64_t>(out, cipher.message_length);
  put_le<std::uint32_t>(out, cipher.challenge_index);
  put_str(out, cipher.key_id);
  put_str(out, cipher.dict_id);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cipher.chunks.size()));
  for (const auto& ch : cipher.chunks) {
    put_le<std::uint64_t>(out, ch.key_byte_offset);
    put_le<std::uint64_t>(out, ch.length);
  }
  out.insert(out.end(), cipher.payload.begin(), cipher.payload.end());
  return out;
}

Ciphertext decode_ciphertext(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kCiphertextMagic.begin(), kCiphertextMagic.end(), bytes.begin(),
                                      [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
    throw FormatError("ciphertext: bad magic");
  Reader in(bytes.subspan(4));
  if (in.le<std::uint32_t>() != kCiphertextFormatVersion) throw FormatError("ciphertext: unsupported version");
  Ciphertext c;
  c.message_length = in.le<std::uint64_t>();
  c.challenge_index = in.le<std::uint32_t>();
  c.key_id = in.str();
  c.dict_id = in.str();
  const auto n = in.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    KeyChunk ch;
    ch.key_byte_offset = in.le<std::uint64_t>();
    ch.length = in.le<std::uint64_t>();
    c.chunks.push_back(ch);
  }
  const auto rest = in.rest();
  if (rest.size() != c.message_length) throw FormatError("ciphertext: payload length differs from header");
  c.payload.assign(rest.begin(), rest.end());
  return c;
}

void write_dictionary(const std::filesystem::path& path, const PublicDictionary& dict) {
  write_key(path, dict.bits, kDictionaryMagic);
}

PublicDictionary read_dictionary(const std::filesystem::path& path) {
  return PublicDictionary{read_key(path, kDictionaryMagic), "", ""};
}

}  // namespace specklepuf
