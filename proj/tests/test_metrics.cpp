#include "doctest.h"

#include <cmath>
#include <vector>

#include "specklepuf/error.hpp"
#include "specklepuf/metrics.hpp"
#include "support.hpp"

using namespace specklepuf;
using specklepuf::testing::random_key;

namespace {

BinaryKey key_from(const std::string& bits, std::size_t rows = 1) {
  BinaryKey k({rows, bits.size() / rows});
  for (std::size_t i = 0; i < bits.size(); ++i) k.set(i, bits[i] == '1');
  return k;
}

}  // namespace

TEST_CASE("entropy: reference values") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) == doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("axis_entropy: rows and columns") {
  // row 0 alternating, row 1 all zero, row 2 one bit in four
  const auto k = key_from("0101010101010101" "0000000000000000" "1000100010001000", 3);
  const auto e = axis_entropy(k);
  REQUIRE(e.per_row.size() == 3);
  REQUIRE(e.per_col.size() == 16);
  CHECK(e.per_row[0] == doctest::Approx(1.0));
  CHECK(e.per_row[1] == 0.0);
  CHECK(e.per_row[2] == doctest::Approx(0.811278).epsilon(1e-6));
  CHECK(e.mean_x == doctest::Approx((1.0 + 0.811278) / 3.0).epsilon(1e-6));
  CHECK_THROWS_AS((void)axis_entropy(BinaryKey{}), ParameterError);
}

TEST_CASE("correlation: invariants") {
  Grid<double> a({8, 8});
  CounterRng rng(2, Stream::kNoise);
  for (auto& v : a.values()) v = rng.uniform();
  Grid<double> neg = a;
  for (auto& v : neg.values()) v = 3.0 - v;
  CHECK(correlation(a, a) == doctest::Approx(1.0));
  CHECK(correlation(a, neg) == doctest::Approx(-1.0));
  const Grid<double> flat({8, 8}, 2.0);
  CHECK_THROWS_AS((void)correlation(flat, flat), UndefinedCorrelationError);
  CHECK(correlation(a, flat) == 0.0);
  CHECK_THROWS_AS((void)correlation(a, Grid<double>({4, 4}, 1.0)), DimensionError);
}

TEST_CASE("fractional_hd: reference values and metric axioms") {
  CHECK(fractional_hd(key_from("0101"), key_from("0110")) == 0.5);
  const auto a = random_key({8, 40}, 1), b = random_key({8, 40}, 2), c = random_key({8, 40}, 3);
  CHECK(fractional_hd(a, a) == 0.0);
  CHECK(fractional_hd(a, ~a) == 1.0);
  CHECK(fractional_hd(a, b) == fractional_hd(b, a));
  CHECK(fractional_hd(a, c) <= fractional_hd(a, b) + fractional_hd(b, c) + 1e-15);
  CHECK(fractional_hd(a ^ c, b ^ c) == fractional_hd(a, b));
  CHECK_THROWS_AS((void)fractional_hd(a, random_key({8, 41}, 1)), ParameterError);
}

TEST_CASE("inter_stats: 50 random keys") {
  std::vector<BinaryKey> keys;
  for (std::uint64_t i = 0; i < 50; ++i) keys.push_back(random_key({32, 32}, 100 + i));
  const auto s = inter_stats(keys);
  CHECK(s.pair_count == 1225);
  CHECK(s.hd_samples.size() == 1225);
  CHECK(s.mean >= 0.45);
  CHECK(s.mean <= 0.55);
  CHECK(s.hd_samples[1] == fractional_hd(keys[0], keys[2]));
  std::size_t total = 0;
  for (auto n : s.histogram.counts) total += n;
  CHECK(total == 1225);
  CHECK_THROWS_AS((void)inter_stats(std::vector<BinaryKey>{keys[0]}), ParameterError);
}

TEST_CASE("intra_stats: identical copies") {
  const std::vector<BinaryKey> keys(5, random_key({4, 16}, 7));
  const auto s = intra_stats(keys);
  CHECK(s.sample_count == 4);
  for (double hd : s.hd_samples) CHECK(hd == 0.0);
  CHECK(s.binomial_fit.n_eff == 64.0);
  CHECK(intra_stats(keys, IntraReference::kAllPairs).sample_count == 10);
}

TEST_CASE("dof and capacity") {
  CHECK(dof(0.499, 5e-5) == doctest::Approx(4999.98).epsilon(1e-9));
  CHECK(dof(0.5, 0.25) == doctest::Approx(1.0));
  CHECK(capacity_log10(5000.0) == doctest::Approx(1505.15).epsilon(1e-5));
  CHECK_THROWS_AS((void)dof(0.5, 0.0), ParameterError);
  CHECK_THROWS_AS((void)dof(0.0, 0.1), ParameterError);
  CHECK_THROWS_AS((void)dof(1.0, 0.1), ParameterError);
}

TEST_CASE("fit_threshold: equal spread meets at the midpoint") {
  CHECK(fit_threshold(GaussianFit{0.1, 0.05}, GaussianFit{0.5, 0.05}) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("fit_threshold: preconditions") {
  CHECK_THROWS_AS((void)fit_threshold(GaussianFit{0.5, 0.05}, GaussianFit{0.4, 0.05}), ParameterError);
  // wide intra density never rises above the inter density between the means
  CHECK_THROWS_AS((void)fit_threshold(GaussianFit{0.4, 10.0}, GaussianFit{0.5, 0.5}), NoIntersectionError);
}

TEST_CASE("make_histogram: explicit width") {
  const std::vector<double> x{0.0, 0.1, 0.1, 0.25, 0.3};
  const auto h = make_histogram(x, 0.1);
  CHECK(h.lower == 0.0);
  std::size_t total = 0;
  for (auto n : h.counts) total += n;
  CHECK(total == 5);
}
