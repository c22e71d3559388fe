#include "specklepuf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "specklepuf/auth.hpp"
#include "specklepuf/crypto.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/pgm.hpp"
#include "specklepuf/rng.hpp"
#include "specklepuf/serialization.hpp"

namespace specklepuf {

using nlohmann::json;

namespace {

std::string indexed(const char* prefix, std::size_t i, const char* suffix = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%03zu%s", prefix, i, suffix);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

template <typename Fn>
void collect(std::vector<std::string>& problems, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (fleet_size < 2) problems.emplace_back("fleet_size: must be at least 2");
  if (remeasure_count == 1) problems.emplace_back("remeasure_count: must be 0 or at least 2");
  collect(problems, [&] { surface.validate(); });
  collect(problems, [&] { optics.validate(); });
  collect(problems, [&] { jitter.validate(); });
  if (challenge_dims.rows == 0 || challenge_dims.cols == 0)
    problems.emplace_back("challenge_dims: must be at least 1x1");
  if (challenge_dims.rows * surface.grid.cols != surface.grid.rows * challenge_dims.cols ||
      optics.detector.rows * surface.grid.cols != surface.grid.rows * optics.detector.cols)
    problems.emplace_back("challenge_dims/detector_dims: aspect ratio must match the token grid");
  if (gabor.size < 3 || gabor.size % 2 == 0) problems.emplace_back("gabor.size: must be odd and at least 3");
  if (static_cast<std::size_t>(std::max(gabor.size, 0)) >= std::min(optics.detector.rows, optics.detector.cols))
    problems.emplace_back("gabor.size: must be smaller than the detector");
  if (!(gabor.wavelength_px >= 0.0)) problems.emplace_back("gabor.wavelength_px: must be >= 0 (0 = auto)");
  if (!(gabor.sigma_px >= 0.0)) problems.emplace_back("gabor.sigma_px: must be >= 0 (0 = auto)");
  if (gabor.stride == 0) problems.emplace_back("gabor.stride: must be at least 1");
  if (threshold_override && !(*threshold_override > 0.0 && *threshold_override < 1.0))
    problems.emplace_back("threshold_override: must lie in (0, 1)");

  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ParameterError(msg);
  }
}

void RunConfig::use_camera_scale() {
  const Dims camera{1024, 1280};
  surface.grid = camera;
  challenge_dims = camera;
  optics.detector = camera;
}

json run_config_to_json(const RunConfig& c) {
  return {{"format_version", kReportFormatVersion},
          {"seeds", {{"fleet", c.fleet_seed}, {"challenge", c.challenge_seed}, {"noise", c.noise_seed}}},
          {"fleet_size", c.fleet_size},
          {"remeasure_count", c.remeasure_count},
          {"surface", c.surface},
          {"challenge_dims", c.challenge_dims},
          {"optics", c.optics},
          {"jitter", c.jitter},
          {"gabor",
           {{"size", c.gabor.size},
            {"wavelength_px", c.gabor.wavelength_px},
            {"sigma_px", c.gabor.sigma_px},
            {"orientation", c.gabor.orientation},
            {"stride", c.gabor.stride}}},
          {"threshold_override", c.threshold_override ? json(*c.threshold_override) : json(nullptr)},
          {"output_dir", c.output_dir},
          {"write_csv", c.write_csv},
          {"write_keys", c.write_keys},
          {"workers", c.workers}};
}

RunConfig run_config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "format_version", "seeds",     "fleet_size",        "remeasure_count", "surface",
      "challenge_dims", "optics",    "jitter",            "gabor",           "threshold_override",
      "output_dir",     "write_csv", "write_keys",        "workers"};
  if (!j.is_object()) throw ParameterError("config: expected a JSON object");
  std::vector<std::string> unknown;
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) unknown.push_back(k);
  if (!unknown.empty()) {
    std::string msg = "config: unknown fields:";
    for (const auto& u : unknown) msg += " " + u;
    throw ParameterError(msg);
  }
  if (j.value("format_version", kReportFormatVersion) != kReportFormatVersion)
    throw ParameterError("config: unsupported format_version");

  RunConfig c;
  try {
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.fleet_seed = s.value("fleet", c.fleet_seed);
      c.challenge_seed = s.value("challenge", c.challenge_seed);
      c.noise_seed = s.value("noise", c.noise_seed);
    }
    c.fleet_size = j.value("fleet_size", c.fleet_size);
    c.remeasure_count = j.value("remeasure_count", c.remeasure_count);
    if (j.contains("surface")) j.at("surface").get_to(c.surface);
    if (j.contains("challenge_dims")) j.at("challenge_dims").get_to(c.challenge_dims);
    if (j.contains("optics")) j.at("optics").get_to(c.optics);
    if (j.contains("jitter")) j.at("jitter").get_to(c.jitter);
    if (j.contains("gabor")) {
      const auto& g = j.at("gabor");
      c.gabor.size = g.value("size", c.gabor.size);
      c.gabor.wavelength_px = g.value("wavelength_px", c.gabor.wavelength_px);
      c.gabor.sigma_px = g.value("sigma_px", c.gabor.sigma_px);
      c.gabor.orientation = g.value("orientation", c.gabor.orientation);
      c.gabor.stride = g.value("stride", c.gabor.stride);
    }
    if (j.contains("threshold_override") && !j.at("threshold_override").is_null())
      c.threshold_override = j.at("threshold_override").get<double>();
    c.output_dir = j.value("output_dir", c.output_dir);
    c.write_csv = j.value("write_csv", c.write_csv);
    c.write_keys = j.value("write_keys", c.write_keys);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  return c;
}

std::uint64_t token_seed(std::uint64_t fleet_seed, std::size_t index) noexcept {
  return CounterRng(fleet_seed, Stream::kKeys).split(index).next_u64();
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

FleetResult run_fleet(const RunConfig& config, bool write_outputs) {
  config.validate();
  const std::size_t n = config.fleet_size;
  const Challenge challenge = make_challenge(config.challenge_seed, config.challenge_dims, "challenge-000");

  std::vector<SpecklePattern> patterns(n);
  parallel_for(n, config.workers, [&](std::size_t i) {
    const VirtualPuf puf = mint_puf(token_seed(config.fleet_seed, i), config.surface, indexed("puf-", i));
    patterns[i] = render_speckle(puf, challenge, config.optics);
  });

  FleetResult res;
  const double grain = estimate_grain_px(patterns[0]);
  if (config.gabor.wavelength_px > 0.0) {
    res.kernel = GaborKernel{config.gabor.size, config.gabor.wavelength_px, config.gabor.wavelength_px / 2.0,
                             config.gabor.orientation};
  } else {
    res.kernel = kernel_for_grain(grain, config.gabor.size, config.gabor.orientation);
  }
  if (config.gabor.sigma_px > 0.0) res.kernel.sigma_px = config.gabor.sigma_px;

  res.fleet_keys.resize(n);
  parallel_for(n, config.workers,
               [&](std::size_t i) { res.fleet_keys[i] = hash_speckle(patterns[i], res.kernel, config.gabor.stride); });

  std::vector<double> max_corr(n, -1.0);
  parallel_for(n, config.workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      max_corr[i] = std::max(max_corr[i], correlation(patterns[i].counts, patterns[j].counts));
  });
  res.max_inter_correlation = *std::max_element(max_corr.begin(), max_corr.end() - 1);

  res.inter = inter_stats(res.fleet_keys);
  std::optional<double> degrees;
  if (res.inter.variance > 0.0 && res.inter.mean > 0.0 && res.inter.mean < 1.0)
    degrees = dof(res.inter.mean, res.inter.variance);

  std::vector<EntropyReport> entropies(n);
  parallel_for(n, config.workers, [&](std::size_t i) { entropies[i] = axis_entropy(res.fleet_keys[i]); });
  for (const auto& e : entropies) {
    res.mean_entropy_x += e.mean_x / static_cast<double>(n);
    res.mean_entropy_y += e.mean_y / static_cast<double>(n);
  }

  json report = {{"format_version", kReportFormatVersion},
                 {"generator", kGeneratorName},
                 {"config", run_config_to_json(config)},
                 {"challenge", challenge_descriptor(challenge)},
                 {"grain_px", grain},
                 {"kernel", res.kernel},
                 {"key_length", res.fleet_keys[0].length()},
                 {"inter", res.inter},
                 {"entropy",
                  {{"fleet_mean_x", res.mean_entropy_x},
                   {"fleet_mean_y", res.mean_entropy_y},
                   {"first_key", entropies[0]}}},
                 {"dof", degrees ? json(*degrees) : json(nullptr)},
                 {"capacity_log10", degrees ? json(capacity_log10(*degrees)) : json(nullptr)}};

  std::vector<SpecklePattern> readings;
  if (config.remeasure_count >= 2) {
    const VirtualPuf puf0 = mint_puf(token_seed(config.fleet_seed, 0), config.surface, indexed("puf-", 0));
    readings.resize(config.remeasure_count);
    res.remeasure_keys.resize(config.remeasure_count);
    parallel_for(config.remeasure_count, config.workers, [&](std::size_t t) {
      const JitterParams jp = sample_jitter(config.jitter, config.noise_seed, t);
      readings[t] = remeasure(puf0, challenge, config.optics, jp, config.jitter.max_shift_um);
      res.remeasure_keys[t] = hash_speckle(readings[t], res.kernel, config.gabor.stride);
    });
    for (std::size_t t = 1; t < readings.size(); ++t)
      res.min_intra_correlation = std::min(res.min_intra_correlation, correlation(readings[0].counts, readings[t].counts));

    res.intra = intra_stats(res.remeasure_keys, IntraReference::kFirstKey, degrees);
    report["intra"] = *res.intra;

    std::string method;
    if (config.threshold_override) {
      res.threshold = *config.threshold_override;
      method = "override";
    } else {
      try {
        res.threshold = fit_threshold(res.inter, *res.intra, IntraDensity::kBinomialGaussian);
        method = "density_intersection";
      } catch (const Error&) {
        res.threshold = 0.5 * (res.intra->mean + res.inter.mean);
        method = "midpoint_fallback";
      }
    }
    report["threshold"] = {{"value", *res.threshold}, {"method", method}};

    const auto length = static_cast<std::int64_t>(res.fleet_keys[0].length());
    if (res.intra->mean > 0.0 && res.intra->mean < *res.threshold && *res.threshold < res.inter.mean &&
        res.inter.mean < 1.0) {
      report["error_rates"] = far_frr(length, *res.threshold, res.intra->mean, res.inter.mean);
    } else {
      report["error_rates"] = nullptr;
    }
  }
  report["correlation"] = {
      {"inter_max", res.max_inter_correlation},
      {"intra_min", readings.empty() ? json(nullptr) : json(res.min_intra_correlation)}};
  res.report = report;

  if (write_outputs) {
    const std::filesystem::path out = config.output_dir;
    std::filesystem::create_directories(out);
    write_json(out / "report.json", report);
    write_json(out / "config.json", run_config_to_json(config));
    if (config.write_csv) {
      std::string csv = "i,j,hd\n";
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt_double(res.inter.hd_samples[k++]) + "\n";
      write_text(out / "inter_hd.csv", csv);
      if (res.intra) {
        std::string icsv = "trial,hd\n";
        for (std::size_t t = 0; t < res.intra->hd_samples.size(); ++t)
          icsv += std::to_string(t + 1) + "," + fmt_double(res.intra->hd_samples[t]) + "\n";
        write_text(out / "intra_hd.csv", icsv);
      }
    }
    if (config.write_keys) {
      std::filesystem::create_directories(out / "keys");
      for (std::size_t i = 0; i < n; ++i) write_key(out / "keys" / indexed("token_", i, ".bpk"), res.fleet_keys[i]);
      for (std::size_t t = 0; t < res.remeasure_keys.size(); ++t)
        write_key(out / "keys" / indexed("remeasure_", t, ".bpk"), res.remeasure_keys[t]);
      write_json(out / "challenge.json", challenge_descriptor(challenge));
      write_pgm(out / "speckle_000.pgm", to_image(patterns[0]));
    }
  }
  return res;
}

double bit_difference(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw ParameterError("bit_difference: lengths differ");
  if (a.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  return static_cast<double>(diff) / (8.0 * static_cast<double>(a.size()));
}

json DemoReport::to_json() const {
  return {{"message_bytes", message_bytes},
          {"bytes_equal", bytes_equal},
          {"bit_difference", bit_difference},
          {"dictionary", dictionary_path.string()},
          {"ciphertext", ciphertext_path.string()},
          {"decrypted", decrypted_path.string()},
          {"ciphertext_preview", preview_path.string()}};
}

DemoReport demo_encrypt(const std::filesystem::path& image_path, const BinaryKey& key_a, const BinaryKey& key_b,
                        const std::filesystem::path& out_dir, const std::optional<BinaryKey>& decrypt_key) {
  const std::vector<std::uint8_t> message = read_file(image_path);
  const GrayImage image = decode_pgm(message);  // rejects empty and non-PGM input

  const std::filesystem::path sender = out_dir / "sender";
  const std::filesystem::path receiver = out_dir / "receiver";
  std::filesystem::create_directories(sender);
  std::filesystem::create_directories(receiver);

  DemoReport rep;
  rep.message_bytes = message.size();
  const PublicDictionary dict = build_dictionary(key_a, key_b);
  rep.dictionary_path = out_dir / "dictionary.bpd";
  write_dictionary(rep.dictionary_path, dict);

  Ciphertext cipher = encrypt(message, key_a, "A");
  cipher.dict_id = dict.id();
  const auto sent = sender / "message.bpc";
  write_file_atomic(sent, encode_ciphertext(cipher));

  // The ciphertext's raster bytes, shown as an image.
  if (image.maxval <= 255) {
    GrayImage preview{Grid<std::uint16_t>(image.pixels.dims()), 255};
    const std::size_t raster = image.pixels.size();
    const std::size_t start = cipher.payload.size() - raster;
    for (std::size_t i = 0; i < raster; ++i) preview.pixels.storage()[i] = cipher.payload[start + i];
    rep.preview_path = out_dir / "ciphertext_preview.pgm";
    write_pgm(rep.preview_path, preview);
  }

  rep.ciphertext_path = receiver / "message.bpc";
  std::filesystem::copy_file(sent, rep.ciphertext_path, std::filesystem::copy_options::overwrite_existing);

  const Ciphertext received = decode_ciphertext(read_file(rep.ciphertext_path));
  const PublicDictionary published{read_key(rep.dictionary_path, kDictionaryMagic), "A", "B"};
  const std::vector<std::uint8_t> plain = decrypt(received, decrypt_key.value_or(key_b), published);
  rep.decrypted_path = receiver / ("decrypted" + image_path.extension().string());
  write_file_atomic(rep.decrypted_path, plain);

  const std::vector<std::uint8_t> written = read_file(rep.decrypted_path);
  rep.bytes_equal = written == message;
  rep.bit_difference = bit_difference(message, written);
  return rep;
}

}  // namespace specklepuf
