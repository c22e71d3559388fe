// Acceptance checks. One PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "specklepuf/auth.hpp"
#include "specklepuf/binomial.hpp"
#include "specklepuf/crypto.hpp"
#include "specklepuf/metrics.hpp"
#include "specklepuf/optics.hpp"
#include "specklepuf/pgm.hpp"
#include "specklepuf/pipeline.hpp"
#include "specklepuf/rng.hpp"

using namespace specklepuf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

BinaryKey random_key(Dims dims, std::uint64_t seed) {
  BinaryKey key(dims);
  CounterRng rng(seed, Stream::kKeys);
  for (std::size_t i = 0; i < key.length(); ++i) key.set(i, (rng.next_u64() >> 63) != 0);
  return key;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, CounterRng& rng) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next_u64());
  return out;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("specklepuf_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Fleet with remeasurements, shared by criteria 1-3.
struct FleetRun {
  FleetResult result;
  double seconds = 0.0;
  double min_corr_vs_clean = 1.0;
};

const FleetRun& default_fleet() {
  static const FleetRun run = [] {
    FleetRun r;
    RunConfig cfg;
    const auto t0 = Clock::now();
    r.result = run_fleet(cfg, false);
    r.seconds = seconds_since(t0);
    const auto puf = mint_puf(token_seed(cfg.fleet_seed, 0), cfg.surface, "puf-000");
    const auto ch = make_challenge(cfg.challenge_seed, cfg.challenge_dims, "challenge-000");
    const auto clean = render_speckle(puf, ch, cfg.optics);
    for (std::size_t t = 0; t < cfg.remeasure_count; ++t) {
      const auto reading = remeasure(puf, ch, cfg.optics, sample_jitter(cfg.jitter, cfg.noise_seed, t),
                                     cfg.jitter.max_shift_um);
      r.min_corr_vs_clean = std::min(r.min_corr_vs_clean, correlation(clean.counts, reading.counts));
    }
    return r;
  }();
  return run;
}

Outcome fleet_uniqueness() {
  const auto& f = default_fleet();
  const double mean = f.result.inter.mean;
  const bool ok = mean >= 0.47 && mean <= 0.53 && f.result.max_inter_correlation < 0.1 && f.seconds <= 120.0 &&
                  f.result.inter.pair_count == 1225;
  return {ok, fmt("mean inter-HD %.4f over %zu pairs, max |corr| %.4f, %.1f s", mean, f.result.inter.pair_count,
                  f.result.max_inter_correlation, f.seconds)};
}

Outcome robustness() {
  const auto& f = default_fleet();
  const double mean = f.result.intra->mean;
  const double corr = std::min(f.min_corr_vs_clean, f.result.min_intra_correlation);
  return {mean <= 0.07 && corr >= 0.95,
          fmt("mean intra-HD %.4f (max %.4f) over %zu readings, min corr %.4f", mean, f.result.intra->max,
              f.result.intra->sample_count, corr)};
}

Outcome entropy() {
  const auto& f = default_fleet();
  return {f.result.mean_entropy_x >= 0.98 && f.result.mean_entropy_y >= 0.98,
          fmt("mean entropy x %.4f, y %.4f", f.result.mean_entropy_x, f.result.mean_entropy_y)};
}

Outcome dof_arithmetic() {
  const double f = dof(0.499, 5e-5);
  const double cap = capacity_log10(5000.0);
  const double mantissa = std::pow(10.0, cap - std::floor(cap));
  const bool ok = std::abs(f - 4999.98) <= 0.5 && std::floor(cap) == 1505.0 && std::abs(mantissa - 1.41) < 0.01;
  return {ok, fmt("F = %.4f, 2^5000 = %.4fe%d", f, mantissa, static_cast<int>(std::floor(cap)))};
}

Outcome binomial_oracle() {
  double worst = 0.0;
  for (double p : {0.1, 0.25, 0.5, 0.9}) {
    for (int n = 0; n <= 20; ++n) {
      std::vector<long double> pmf(n + 1);
      long double c = 1.0L;
      for (int k = 0; k <= n; ++k) {
        pmf[k] = c * std::pow(static_cast<long double>(p), k) * std::pow(1.0L - p, n - k);
        c = c * (n - k) / (k + 1);
      }
      long double acc = 0.0L;
      for (int k = 0; k <= n; ++k) {
        acc += pmf[k];
        worst = std::max(worst, static_cast<double>(std::abs((binom_cdf(k, n, p).value - acc) / acc)));
      }
    }
  }
  const double f3 = binom_cdf(3, 10, 0.5).value;
  return {worst <= 1e-12 && f3 == 0.171875, fmt("worst relative error %.2e, F(3,10,0.5) = %.9g", worst, f3)};
}

Outcome operating_point() {
  const auto t0 = Clock::now();
  const auto r = far_frr(1'310'720, 0.388, 0.016, 0.499);
  const double secs = seconds_since(t0);
  return {r.far.log10 < -200.0 && r.frr.log10 < -200.0 && secs <= 1.0,
          fmt("log10 FAR %.1f, log10 FRR %.1f, %.3f s", r.far.log10, r.frr.log10, secs)};
}

Outcome threshold_reconstruction() {
  InterStats inter;
  inter.mean = 0.499;
  inter.variance = 5e-5;
  inter.gaussian_fit = {0.499, std::sqrt(5e-5)};

  // 50 intra samples standardised to mean 0.016 and sigma (0.038 - 0.005) / 6.
  const double sigma = (0.038 - 0.005) / 6.0;
  CounterRng rng(2024, Stream::kNoise);
  std::vector<double> z(50);
  for (auto& v : z) v = rng.normal();
  double m = 0.0, s = 0.0;
  for (double v : z) m += v;
  m /= static_cast<double>(z.size());
  for (double v : z) s += (v - m) * (v - m);
  s = std::sqrt(s / static_cast<double>(z.size() - 1));
  IntraStats intra;
  intra.sample_count = z.size();
  for (double v : z) intra.hd_samples.push_back(0.016 + sigma * (v - m) / s);
  intra.mean = 0.016;
  intra.variance = sigma * sigma;
  intra.binomial_fit = {1'310'720.0, 0.016};

  const double t = fit_threshold(inter, intra, IntraDensity::kSampleMoments);
  return {std::abs(t - 0.388) <= 0.05, fmt("T = %.4f from N(0.016, %.4f^2) vs N(0.499, 5e-5)", t, sigma)};
}

Outcome crypto_round_trip() {
  CounterRng rng(88, Stream::kSelection);
  int mismatches = 0;
  double worst_wrong = 0.5;
  for (int trial = 0; trial < 100; ++trial) {
    const Dims dims{64, 128};
    const auto a = random_key(dims, 3 * trial + 1), b = random_key(dims, 3 * trial + 2);
    const auto wrong = random_key(dims, 3 * trial + 3);
    const auto m = random_bytes(1 + rng.next_u64() % (dims.size() / 8), rng);
    const auto dict = build_dictionary(a, b);
    const auto c = encrypt(m, a);
    mismatches += decrypt(c, b, dict) != m;
    if (m.size() >= 256) {
      const double diff = bit_difference(m, decrypt(c, wrong, dict));
      if (std::abs(diff - 0.5) > std::abs(worst_wrong - 0.5)) worst_wrong = diff;
    }
  }

  const fs::path dir = scratch("crypto");
  SurfaceParams s;
  s.grid = {64, 64};
  OpticsConfig o;
  o.detector = {64, 64};
  write_pgm(dir / "image.pgm", to_image(render_speckle(mint_puf(5, s), make_challenge(6, {64, 64}), o)));
  const auto ka = random_key({256, 256}, 1001), kb = random_key({256, 256}, 1002);
  const auto good = demo_encrypt(dir / "image.pgm", ka, kb, dir / "good");
  const auto bad = demo_encrypt(dir / "image.pgm", ka, kb, dir / "bad", random_key({256, 256}, 1003));
  fs::remove_all(dir);

  const bool ok = mismatches == 0 && good.bytes_equal && !bad.bytes_equal &&
                  std::abs(worst_wrong - 0.5) <= 0.05 && std::abs(bad.bit_difference - 0.5) <= 0.05;
  return {ok, fmt("%d/100 mismatches, image byte-identical %s, wrong-key bit difference %.4f (image %.4f)",
                  mismatches, good.bytes_equal ? "yes" : "no", worst_wrong, bad.bit_difference)};
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

Outcome determinism() {
  const fs::path base = scratch("determinism");
  std::map<std::string, std::vector<std::uint8_t>> trees[2];
  for (int run = 0; run < 2; ++run) {
    RunConfig cfg;
    cfg.fleet_size = 20;
    cfg.remeasure_count = 20;
    cfg.output_dir = (base / "fleet").string();
    fs::remove_all(cfg.output_dir);
    const auto res = run_fleet(cfg);
    // 64x64 crop of the first speckle image as the plaintext
    const auto full = read_pgm(fs::path(cfg.output_dir) / "speckle_000.pgm");
    GrayImage crop{Grid<std::uint16_t>({64, 64}), full.maxval};
    for (std::size_t r = 0; r < 64; ++r)
      for (std::size_t c = 0; c < 64; ++c) crop.pixels(r, c) = full.pixels(r, c);
    write_pgm(base / "crop.pgm", crop);
    (void)demo_encrypt(base / "crop.pgm", res.fleet_keys[0], res.fleet_keys[1], fs::path(cfg.output_dir) / "demo");
    trees[run] = tree_bytes(cfg.output_dir);
  }
  fs::remove_all(base);
  std::size_t keys = 0, ciphertexts = 0;
  for (const auto& [name, _] : trees[0]) {
    keys += name.ends_with(".bpk");
    ciphertexts += name.ends_with(".bpc");
  }
  const bool ok = trees[0] == trees[1] && trees[0].contains("report.json") && keys > 0 && ciphertexts > 0;
  return {ok, fmt("%zu files compared (%zu keys, %zu ciphertexts), identical %s", trees[0].size(), keys, ciphertexts,
                  trees[0] == trees[1] ? "yes" : "no")};
}

Outcome propagation_sanity() {
  const auto ch = make_challenge(17, {256, 256});
  SurfaceParams rough;
  rough.rms_height_um = 5.0;
  const auto puf = mint_puf(18, rough);
  Grid<std::complex<double>> field(ch.dims);
  for (std::size_t i = 0; i < field.size(); ++i) field.values()[i] = std::polar(1.0, ch.phase.values()[i]);
  const double p0 = total_power(field);
  const OpticsConfig optics;
  auto at_token = propagate_angular_spectrum(field, rough.pitch_um, optics.wavelength_um, optics.z1_um);
  const double p1 = total_power(at_token);
  const double k = 2.0 * std::numbers::pi / optics.wavelength_um * (rough.refractive_index - 1.0);
  for (std::size_t i = 0; i < at_token.size(); ++i) at_token.values()[i] *= std::polar(1.0, k * puf.height_um.values()[i]);
  const auto at_detector = propagate_angular_spectrum(at_token, rough.pitch_um, optics.wavelength_um, optics.z2_um);
  const double p2 = total_power(at_detector);
  const double err = std::max(std::abs(p1 - p0) / p0, std::abs(p2 - p1) / p1);

  const auto intensity = render_intensity(puf, ch, optics);
  double mean = 0.0, sq = 0.0;
  for (double v : intensity.values()) mean += v;
  mean /= static_cast<double>(intensity.size());
  for (double v : intensity.values()) sq += (v - mean) * (v - mean);
  const double contrast = std::sqrt(sq / static_cast<double>(intensity.size())) / mean;
  return {err <= 1e-6 && contrast >= 0.8 && contrast <= 1.2,
          fmt("max relative power change %.2e, speckle contrast %.4f", err, contrast)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 fleet uniqueness", fleet_uniqueness},
      {"2 robustness", robustness},
      {"3 entropy", entropy},
      {"4 dof arithmetic", dof_arithmetic},
      {"5 binomial tail oracle", binomial_oracle},
      {"6 operating point FAR/FRR", operating_point},
      {"7 threshold reconstruction", threshold_reconstruction},
      {"8 crypto round trip", crypto_round_trip},
      {"9 determinism", determinism},
      {"10 propagation sanity", propagation_sanity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
