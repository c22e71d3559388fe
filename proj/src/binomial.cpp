#include "specklepuf/binomial.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "specklepuf/error.hpp"

namespace specklepuf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn10 = std::numbers::ln10;

// log(n!) - log(sqrt(2 pi n) (n / e)^n)
double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n == 0.0) return 0.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, without cancellation when x is close to np.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

void check_args(std::int64_t n, double p) {
  if (n < 0) throw ParameterError("binomial: n must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial: p must lie in [0, 1]");
}

// ln sum_{j=0}^{k} pmf(j), summing downwards from k. Terms shrink once
// j is below the mode, so the loop ends after a few hundred steps even
// for n ~ 10^6 away from the mean.
double log_lower_sum(std::int64_t k, std::int64_t n, double p) {
  const double q = 1.0 - p;
  const double log_top = binom_log_pmf(k, n, p);
  double term = 1.0, sum = 1.0;
  for (std::int64_t j = k; j >= 1; --j) {
    const double ratio = static_cast<double>(j) * q / (static_cast<double>(n - j + 1) * p);
    term *= ratio;
    sum += term;
    if (ratio < 1.0 && term < sum * 1e-18) break;
  }
  return log_top + std::log(sum);
}

// ln sum_{j=k}^{n} pmf(j), summing upwards from k.
double log_upper_sum(std::int64_t k, std::int64_t n, double p) {
  const double q = 1.0 - p;
  const double log_bottom = binom_log_pmf(k, n, p);
  double term = 1.0, sum = 1.0;
  for (std::int64_t j = k; j < n; ++j) {
    const double ratio = static_cast<double>(n - j) * p / (static_cast<double>(j + 1) * q);
    term *= ratio;
    sum += term;
    if (ratio < 1.0 && term < sum * 1e-18) break;
  }
  return log_bottom + std::log(sum);
}

// Direct sum with exact integer coefficients; C(62, 31) < 2^63.
constexpr std::int64_t kDirectLimit = 62;

Probability direct_sum(std::int64_t from, std::int64_t to, std::int64_t n, double p) {
  const long double pl = p, ql = 1.0L - static_cast<long double>(p);
  std::uint64_t c = 1;
  long double sum = 0.0L;
  for (std::int64_t j = 0; j <= to; ++j) {
    if (j >= from) sum += static_cast<long double>(c) * std::pow(pl, j) * std::pow(ql, n - j);
    c = c / static_cast<std::uint64_t>(j + 1) * static_cast<std::uint64_t>(n - j) +
        c % static_cast<std::uint64_t>(j + 1) * static_cast<std::uint64_t>(n - j) / static_cast<std::uint64_t>(j + 1);
  }
  return {static_cast<double>(sum), sum > 0.0L ? static_cast<double>(std::log10(sum)) : kNegInf};
}

Probability from_ln(double ln_value) { return {std::exp(ln_value), ln_value / kLn10}; }

// ln(1 - e^x) for x <= 0.
double log1m_exp(double x) { return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x)); }

}  // namespace

double binom_log_pmf(std::int64_t k, std::int64_t n, double p) {
  check_args(n, p);
  if (k < 0 || k > n) return kNegInf;
  const double q = 1.0 - p;
  const auto x = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (q == 0.0) return k == n ? 0.0 : kNegInf;
  if (k == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -deviance(nd, nd * q) - nd * p : nd * std::log(q);
  }
  if (k == n) return q < 0.1 ? -deviance(nd, nd * p) - nd * q : nd * std::log(p);
  const double lc = stirling_error(nd) - stirling_error(x) - stirling_error(nd - x) -
                    deviance(x, nd * p) - deviance(nd - x, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / nd);
  return lc - 0.5 * lf;
}

Probability binom_cdf(std::int64_t k, std::int64_t n, double p) {
  check_args(n, p);
  if (k < 0 || k > n) throw ParameterError("binomial: k must lie in [0, n]");
  if (k == n || p == 0.0) return {1.0, 0.0};
  if (p == 1.0) return {0.0, kNegInf};
  if (n <= kDirectLimit) return direct_sum(0, k, n, p);
  if (static_cast<double>(k) < static_cast<double>(n) * p) return from_ln(log_lower_sum(k, n, p));
  return from_ln(log1m_exp(log_upper_sum(k + 1, n, p)));
}

Probability binom_sf(std::int64_t k, std::int64_t n, double p) {
  check_args(n, p);
  if (k < 0 || k > n) throw ParameterError("binomial: k must lie in [0, n]");
  if (k == n || p == 0.0) return {0.0, kNegInf};
  if (p == 1.0) return {1.0, 0.0};
  if (n <= kDirectLimit) return direct_sum(k + 1, n, n, p);
  if (static_cast<double>(k + 1) > static_cast<double>(n) * p) return from_ln(log_upper_sum(k + 1, n, p));
  return from_ln(log1m_exp(log_lower_sum(k, n, p)));
}

}  // namespace specklepuf
