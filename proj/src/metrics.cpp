#include "specklepuf/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "specklepuf/error.hpp"

namespace specklepuf {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(std::span<const double> xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
  }
  return m;
}

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <typename T>
double pearson(const Grid<T>& a, const Grid<T>& b) {
  if (a.dims() != b.dims()) throw DimensionError("correlation: grids must have equal dims");
  if (a.empty()) throw ParameterError("correlation: grids must be non-empty");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += static_cast<double>(a.storage()[i]);
    mb += static_cast<double>(b.storage()[i]);
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = static_cast<double>(a.storage()[i]) - ma;
    const double db = static_cast<double>(b.storage()[i]) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 && sbb == 0.0)
    throw UndefinedCorrelationError("correlation: both grids are constant");
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::size_t hamming(const BinaryKey& a, const BinaryKey& b) noexcept {
  std::size_t n = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) n += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return n;
}

double gaussian_log_density(double x, const GaussianFit& g) {
  const double z = (x - g.mean) / g.stddev;
  return -0.5 * z * z - std::log(g.stddev);
}

}  // namespace

Histogram make_histogram(std::span<const double> samples, double bin_width) {
  Histogram h;
  if (samples.empty()) return h;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(bin_width > 0.0)) {
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    bin_width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
  }
  h.lower = lo;
  if (!(bin_width > 0.0) || hi == lo) {
    h.bin_width = hi > lo ? hi - lo : 0.0;
    h.counts.assign(1, sorted.size());
    return h;
  }
  h.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((hi - lo) / bin_width)) + 1;
  h.counts.assign(bins, 0);
  for (double x : sorted) {
    auto idx = static_cast<std::size_t>(std::floor((x - lo) / bin_width));
    h.counts[std::min(idx, bins - 1)]++;
  }
  return h;
}

double binary_entropy(double p) noexcept {
  double e = 0.0;
  if (p > 0.0) e -= p * std::log2(p);
  if (p < 1.0) e -= (1.0 - p) * std::log2(1.0 - p);
  return e;
}

EntropyReport axis_entropy(const BinaryKey& key) {
  if (key.empty()) throw ParameterError("key: must be non-empty");
  const Dims d = key.dims();
  std::vector<std::size_t> row_ones(d.rows, 0), col_ones(d.cols, 0);
  for (std::size_t r = 0; r < d.rows; ++r)
    for (std::size_t c = 0; c < d.cols; ++c)
      if (key.bit(r, c)) {
        ++row_ones[r];
        ++col_ones[c];
      }

  EntropyReport rep;
  rep.per_row.reserve(d.rows);
  for (std::size_t n : row_ones)
    rep.per_row.push_back(binary_entropy(static_cast<double>(n) / static_cast<double>(d.cols)));
  rep.per_col.reserve(d.cols);
  for (std::size_t n : col_ones)
    rep.per_col.push_back(binary_entropy(static_cast<double>(n) / static_cast<double>(d.rows)));

  const Moments mx = moments(rep.per_row);
  const Moments my = moments(rep.per_col);
  rep.mean_x = mx.mean;
  rep.std_x = std::sqrt(mx.variance);
  rep.mean_y = my.mean;
  rep.std_y = std::sqrt(my.variance);
  return rep;
}

double correlation(const Grid<double>& a, const Grid<double>& b) { return pearson(a, b); }

double correlation(const Grid<std::uint16_t>& a, const Grid<std::uint16_t>& b) { return pearson(a, b); }

double fractional_hd(const BinaryKey& a, const BinaryKey& b) {
  if (a.length() != b.length()) throw ParameterError("fractional_hd: key lengths differ");
  if (a.empty()) throw ParameterError("fractional_hd: keys are empty");
  return static_cast<double>(hamming(a, b)) / static_cast<double>(a.length());
}

InterStats inter_stats(std::span<const BinaryKey> keys, double bin_width) {
  if (keys.size() < 2) throw ParameterError("keys: need at least 2");
  for (const auto& k : keys)
    if (k.length() != keys[0].length()) throw ParameterError("keys: lengths differ");

  InterStats s;
  s.key_count = keys.size();
  s.hd_samples.reserve(keys.size() * (keys.size() - 1) / 2);
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j) s.hd_samples.push_back(fractional_hd(keys[i], keys[j]));
  s.pair_count = s.hd_samples.size();

  const Moments m = moments(s.hd_samples);
  s.mean = m.mean;
  s.variance = m.variance;
  s.gaussian_fit = {m.mean, std::sqrt(m.variance)};
  s.histogram = make_histogram(s.hd_samples, bin_width);
  return s;
}

IntraStats intra_stats(std::span<const BinaryKey> keys, IntraReference reference,
                       std::optional<double> n_eff, double bin_width) {
  if (keys.size() < 2) throw ParameterError("keys: need at least 2");
  for (const auto& k : keys)
    if (k.length() != keys[0].length()) throw ParameterError("keys: lengths differ");
  if (n_eff && !(*n_eff > 0.0)) throw ParameterError("n_eff: must be positive");

  IntraStats s;
  if (reference == IntraReference::kFirstKey) {
    for (std::size_t i = 1; i < keys.size(); ++i) s.hd_samples.push_back(fractional_hd(keys[0], keys[i]));
  } else {
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (std::size_t j = i + 1; j < keys.size(); ++j) s.hd_samples.push_back(fractional_hd(keys[i], keys[j]));
  }
  s.sample_count = s.hd_samples.size();
  const Moments m = moments(s.hd_samples);
  s.mean = m.mean;
  s.variance = m.variance;
  const auto [lo, hi] = std::minmax_element(s.hd_samples.begin(), s.hd_samples.end());
  s.min = *lo;
  s.max = *hi;
  s.binomial_fit = {n_eff.value_or(static_cast<double>(keys[0].length())), m.mean};
  s.histogram = make_histogram(s.hd_samples, bin_width);
  return s;
}

double dof(double mean, double variance) {
  if (!(variance > 0.0)) throw ParameterError("variance: must be positive");
  if (!(mean > 0.0 && mean < 1.0)) throw ParameterError("mean: must lie strictly inside (0, 1)");
  return mean * (1.0 - mean) / variance;
}

double capacity_log10(double degrees_of_freedom) noexcept { return degrees_of_freedom * std::log10(2.0); }

GaussianFit intra_gaussian(const IntraStats& intra, IntraDensity model) {
  if (model == IntraDensity::kSampleMoments) return {intra.mean, std::sqrt(intra.variance)};
  const double p = intra.binomial_fit.p_hat;
  return {p, std::sqrt(p * (1.0 - p) / intra.binomial_fit.n_eff)};
}

double fit_threshold(const GaussianFit& intra, const GaussianFit& inter) {
  if (!(intra.mean < inter.mean)) throw ParameterError("threshold: intra mean must be below inter mean");
  if (!(intra.stddev > 0.0) || !(inter.stddev > 0.0))
    throw ParameterError("threshold: both fits need a positive spread");

  // diff > 0 where the intra density dominates.
  auto diff = [&](double x) { return gaussian_log_density(x, intra) - gaussian_log_density(x, inter); };
  double lo = intra.mean;
  double hi = inter.mean;
  const double dlo = diff(lo);
  const double dhi = diff(hi);
  if (!(dlo > 0.0 && dhi < 0.0)) throw NoIntersectionError("threshold: densities do not cross between the means");

  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (diff(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double fit_threshold(const InterStats& inter, const IntraStats& intra, IntraDensity model) {
  return fit_threshold(intra_gaussian(intra, model), inter.gaussian_fit);
}

}  // namespace specklepuf
