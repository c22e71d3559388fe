#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "specklepuf/binary_key.hpp"
#include "specklepuf/binomial.hpp"
#include "specklepuf/optics.hpp"

namespace specklepuf {

inline constexpr int kStoreFormatVersion = 1;

struct CrpRecord {
  std::string puf_id;
  std::string challenge_id;
  std::uint64_t challenge_seed = 0;
  Dims challenge_dims;
  BinaryKey key;
  std::string enrolled_at;  // ISO-8601 UTC
  int format_version = kStoreFormatVersion;
};

struct AuthDecision {
  double hd = 0.0;
  double threshold = 0.0;
  bool accept = false;
  std::string puf_id;
  std::string challenge_id;
};

/// Directory-backed CRP database: `index.json` plus one key file per
/// record. Every write goes through write-temp-then-rename, key file
/// first and index last, so a crash never leaves the index pointing at
/// a missing key. Within a process, enrolls serialise and verifies run
/// concurrently.
class CrpStore {
 public:
  /// Opens or creates the store at `dir`.
  explicit CrpStore(std::filesystem::path dir);

  const std::filesystem::path& directory() const noexcept { return dir_; }

  /// `timestamp` defaults to the current UTC time.
  CrpRecord enroll(const std::string& puf_id, const Challenge& challenge, const BinaryKey& key,
                   std::optional<std::string> timestamp = std::nullopt);

  /// Throws NotFoundError for an unknown pair.
  CrpRecord get(const std::string& puf_id, const std::string& challenge_id) const;
  bool contains(const std::string& puf_id, const std::string& challenge_id) const;

  /// Records without key payloads, ordered by (puf_id, challenge_id).
  std::vector<CrpRecord> list() const;
  std::size_t size() const;

  /// Reload the index from disk, picking up enrolls by other processes.
  void refresh();

 private:
  struct Entry {
    std::string challenge_id;
    std::uint64_t challenge_seed = 0;
    Dims challenge_dims;
    std::string key_file;
    std::string enrolled_at;
    std::size_t key_length = 0;
  };
  using Key = std::pair<std::string, std::string>;

  void load_index();
  void save_index() const;

  std::filesystem::path dir_;
  std::map<Key, Entry> index_;
  std::uint64_t next_file_ = 0;
  mutable std::shared_mutex mutex_;
};

AuthDecision verify(const CrpStore& store, const std::string& puf_id, const std::string& challenge_id,
                    const BinaryKey& candidate, double threshold);

/// Seeded choice of one enrolled challenge for `puf_id`.
CrpRecord select_challenge(const CrpStore& store, const std::string& puf_id, std::uint64_t seed);

enum class RateReading {
  kStandard,   // FAR from the inter (impostor) mean, FRR from the intra (genuine) mean
  kAsPrinted,  // FAR = 1 - F(LT, L, d_intra), FRR = F(LT, L, d_inter)
};

struct ErrorRates {
  Probability far;
  Probability frr;
  std::int64_t length = 0;
  double threshold = 0.0;
  std::int64_t threshold_count = 0;  // floor(L T)
  double d_intra = 0.0;
  double d_inter = 0.0;
  RateReading reading = RateReading::kStandard;
};

ErrorRates far_frr(std::int64_t length, double threshold, double d_intra, double d_inter,
                   RateReading reading = RateReading::kStandard);

}  // namespace specklepuf
