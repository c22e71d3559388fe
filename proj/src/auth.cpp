#include "specklepuf/auth.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>

#include "json.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/metrics.hpp"
#include "specklepuf/pgm.hpp"
#include "specklepuf/rng.hpp"

namespace specklepuf {

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

CrpStore::CrpStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create store directory " + dir_.string());
  if (std::filesystem::exists(dir_ / "index.json")) {
    load_index();
  } else {
    save_index();
  }
}

void CrpStore::load_index() {
  json doc;
  try {
    const auto bytes = read_file(dir_ / "index.json");
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(std::string("store index: ") + e.what());
  }
  if (doc.value("format_version", 0) != kStoreFormatVersion)
    throw FormatError("store index: unsupported format version");

  std::map<Key, Entry> index;
  try {
    for (const auto& r : doc.at("records")) {
      Entry e;
      e.challenge_id = r.at("challenge_id").get<std::string>();
      e.challenge_seed = r.at("challenge_seed").get<std::uint64_t>();
      e.challenge_dims = {r.at("challenge_dims").at(0).get<std::size_t>(),
                          r.at("challenge_dims").at(1).get<std::size_t>()};
      e.key_file = r.at("key_file").get<std::string>();
      e.enrolled_at = r.at("enrolled_at").get<std::string>();
      e.key_length = r.at("key_length").get<std::size_t>();
      index.emplace(Key{r.at("puf_id").get<std::string>(), e.challenge_id}, std::move(e));
    }
    next_file_ = doc.at("next_file").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("store index: ") + e.what());
  }
  index_ = std::move(index);
}

void CrpStore::save_index() const {
  json records = json::array();
  for (const auto& [k, e] : index_) {
    records.push_back({{"puf_id", k.first},
                       {"challenge_id", e.challenge_id},
                       {"challenge_seed", e.challenge_seed},
                       {"challenge_dims", {e.challenge_dims.rows, e.challenge_dims.cols}},
                       {"key_file", e.key_file},
                       {"key_length", e.key_length},
                       {"enrolled_at", e.enrolled_at}});
  }
  const json doc = {{"format_version", kStoreFormatVersion}, {"next_file", next_file_}, {"records", records}};
  const std::string text = doc.dump(2) + "\n";
  write_file_atomic(dir_ / "index.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void CrpStore::refresh() {
  std::unique_lock lock(mutex_);
  load_index();
}

CrpRecord CrpStore::enroll(const std::string& puf_id, const Challenge& challenge, const BinaryKey& key,
                           std::optional<std::string> timestamp) {
  if (puf_id.empty()) throw ParameterError("puf_id: must be non-empty");
  if (challenge.challenge_id.empty()) throw ParameterError("challenge_id: must be non-empty");
  if (key.empty()) throw ParameterError("key: must be non-empty");

  std::unique_lock lock(mutex_);
  const Key k{puf_id, challenge.challenge_id};
  if (index_.contains(k)) throw ConflictError("pair already enrolled: " + puf_id + " / " + challenge.challenge_id);

  char name[32];
  std::snprintf(name, sizeof name, "crp_%08llu.bpk", static_cast<unsigned long long>(next_file_));
  Entry e{challenge.challenge_id, challenge.seed, challenge.dims, name,
          timestamp.value_or(utc_now()), key.length()};

  write_key(dir_ / e.key_file, key);
  index_.emplace(k, e);
  ++next_file_;
  try {
    save_index();
  } catch (...) {
    index_.erase(k);
    --next_file_;
    std::error_code ec;
    std::filesystem::remove(dir_ / e.key_file, ec);
    throw;
  }
  return CrpRecord{puf_id, e.challenge_id, e.challenge_seed, e.challenge_dims, key, e.enrolled_at,
                   kStoreFormatVersion};
}

CrpRecord CrpStore::get(const std::string& puf_id, const std::string& challenge_id) const {
  std::shared_lock lock(mutex_);
  const auto it = index_.find(Key{puf_id, challenge_id});
  if (it == index_.end()) throw NotFoundError("no record for " + puf_id + " / " + challenge_id);
  const Entry& e = it->second;
  BinaryKey key = read_key(dir_ / e.key_file);
  if (key.length() != e.key_length) throw FormatError("stored key length disagrees with index");
  return CrpRecord{puf_id, e.challenge_id, e.challenge_seed, e.challenge_dims, std::move(key),
                   e.enrolled_at, kStoreFormatVersion};
}

bool CrpStore::contains(const std::string& puf_id, const std::string& challenge_id) const {
  std::shared_lock lock(mutex_);
  return index_.contains(Key{puf_id, challenge_id});
}

std::vector<CrpRecord> CrpStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<CrpRecord> out;
  out.reserve(index_.size());
  for (const auto& [k, e] : index_)
    out.push_back(CrpRecord{k.first, e.challenge_id, e.challenge_seed, e.challenge_dims, BinaryKey{},
                            e.enrolled_at, kStoreFormatVersion});
  return out;
}

std::size_t CrpStore::size() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

AuthDecision verify(const CrpStore& store, const std::string& puf_id, const std::string& challenge_id,
                    const BinaryKey& candidate, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ParameterError("threshold: must lie in [0, 1]");
  const CrpRecord rec = store.get(puf_id, challenge_id);
  if (candidate.length() != rec.key.length())
    throw ParameterError("candidate length does not match the enrolled key");
  const double hd = fractional_hd(rec.key, candidate);
  return AuthDecision{hd, threshold, hd < threshold, puf_id, challenge_id};
}

CrpRecord select_challenge(const CrpStore& store, const std::string& puf_id, std::uint64_t seed) {
  std::vector<CrpRecord> candidates;
  for (auto& r : store.list())
    if (r.puf_id == puf_id) candidates.push_back(std::move(r));
  if (candidates.empty()) throw NotFoundError("no challenges enrolled for " + puf_id);
  CounterRng rng(seed, Stream::kSelection);
  const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size()));
  return store.get(puf_id, candidates[pick].challenge_id);
}

ErrorRates far_frr(std::int64_t length, double threshold, double d_intra, double d_inter, RateReading reading) {
  if (length < 1) throw ParameterError("length: must be at least 1");
  if (!(0.0 < d_intra && d_intra < threshold && threshold < d_inter && d_inter < 1.0))
    throw ParameterError("need 0 < d_intra < threshold < d_inter < 1");

  const auto count = static_cast<std::int64_t>(std::floor(static_cast<double>(length) * threshold + 1e-9));
  ErrorRates r;
  r.length = length;
  r.threshold = threshold;
  r.threshold_count = count;
  r.d_intra = d_intra;
  r.d_inter = d_inter;
  r.reading = reading;
  if (reading == RateReading::kStandard) {
    r.far = binom_cdf(count, length, d_inter);
    r.frr = binom_sf(count, length, d_intra);
  } else {
    r.far = binom_sf(count, length, d_intra);
    r.frr = binom_cdf(count, length, d_inter);
  }
  return r;
}

}  // namespace specklepuf
