#include "doctest.h"

#include <cmath>
#include <complex>

#include "specklepuf/error.hpp"
#include "specklepuf/hashing.hpp"
#include "specklepuf/metrics.hpp"
#include "support.hpp"

using namespace specklepuf;

namespace {

SpecklePattern small_speckle(std::uint64_t seed) {
  SurfaceParams s;
  s.grid = {64, 64};
  OpticsConfig o;
  o.detector = {64, 64};
  return render_speckle(mint_puf(seed, s), make_challenge(77, {64, 64}), o);
}

}  // namespace

TEST_CASE("gabor: kernel is DC free") {
  const auto k = gabor_coefficients(GaborKernel{17, 4.0, 2.0, 0.3});
  std::complex<double> sum{};
  for (auto v : k.values()) sum += v;
  CHECK(std::abs(sum) < 1e-12);
}

TEST_CASE("gabor: zero and constant images") {
  const GaborKernel k{};
  const auto zero = gabor_filter(Grid<double>({32, 32}, 0.0), k);
  for (auto v : zero.values()) CHECK(std::abs(v) == 0.0);
  const double c = 200.0;
  const auto flat = gabor_filter(Grid<double>({32, 32}, c), k);
  for (auto v : flat.values()) CHECK(std::abs(v) <= 1e-6 * c);
}

TEST_CASE("gabor: impulse response reproduces the kernel") {
  const GaborKernel k{9, 4.0, 2.0, 0.7};
  Grid<double> img({33, 33}, 0.0);
  img(16, 16) = 1.0;
  const auto resp = gabor_filter(img, k);
  const auto coeff = gabor_coefficients(k);
  const double mean = 1.0 / (33.0 * 33.0);
  // response to (delta - mean): kernel minus a constant that the zero-mean kernel annihilates
  for (int dr = -4; dr <= 4; ++dr) {
    for (int dc = -4; dc <= 4; ++dc) {
      const auto expected = coeff(4 + dr, 4 + dc);
      const auto got = resp(16 + dr, 16 + dc);
      CHECK(std::abs(got - expected) < 1e-9 + 1e-9 * mean);
    }
  }
}

TEST_CASE("gabor: kernel no smaller than the image is rejected") {
  CHECK_THROWS_AS((void)gabor_filter(Grid<double>({16, 16}, 1.0), GaborKernel{17, 2.0, 1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS((void)gabor_coefficients(GaborKernel{16, 2.0, 1.0, 0.0}), ParameterError);
}

TEST_CASE("binarize: sign antisymmetry, ties and length") {
  ComplexGrid r({4, 5});
  CounterRng rng(3, Stream::kNoise);
  for (auto& v : r.values()) v = {rng.normal(), rng.normal()};
  r(0, 0) = {0.0, 1.0};
  ComplexGrid neg = r;
  for (auto& v : neg.values()) v = -v;
  const auto key = binarize(r);
  const auto nkey = binarize(neg);
  CHECK(key.bit(0) == false);
  for (std::size_t i = 1; i < key.length(); ++i) CHECK(nkey.bit(i) == !key.bit(i));

  ComplexGrid pos({2, 3}, std::complex<double>{1.0, -5.0});
  CHECK(binarize(pos).popcount() == 6);

  ComplexGrid big({1024, 1280}, std::complex<double>{1.0, 0.0});
  CHECK(binarize(big).length() == 1'310'720);
  CHECK(binarize(big, 2).dims() == Dims{512, 640});
}

TEST_CASE("hash_speckle: deterministic and complemented by inversion") {
  const auto p = small_speckle(5);
  const GaborKernel k{9, 4.0, 2.0, 0.0};
  const auto key = hash_speckle(p, k);
  CHECK(hash_speckle(p, k) == key);
  auto inv = p;
  for (auto& v : inv.counts.values()) v = static_cast<std::uint16_t>(255 - v);
  const auto ikey = hash_speckle(inv, k);
  CHECK(fractional_hd(key, ~ikey) <= 1e-3);
}

TEST_CASE("hash_speckle: independent tokens give HD near one half") {
  const GaborKernel k{9, 2.0, 1.0, 0.0};
  const double hd = fractional_hd(hash_speckle(small_speckle(1), k), hash_speckle(small_speckle(2), k));
  CHECK(hd >= 0.45);
  CHECK(hd <= 0.55);
}

TEST_CASE("hash: local changes stay local") {
  auto p = small_speckle(9);
  const GaborKernel k{9, 4.0, 2.0, 0.0};
  const auto before = hash_speckle(p, k);
  p.counts(32, 32) = static_cast<std::uint16_t>(255 - p.counts(32, 32));
  const auto after = hash_speckle(p, k);
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 64; ++c) {
      const bool far = std::abs(static_cast<long>(r) - 32) > 4 || std::abs(static_cast<long>(c) - 32) > 4;
      if (far && before.bit(r, c) != after.bit(r, c)) {
        // the mean shift touches everything weakly; only near-zero responses may flip
        const auto resp = gabor_filter(p, k);
        CHECK(std::abs(resp(r, c).real()) < 1.0);
      }
    }
  }
}

TEST_CASE("grain estimate follows the speckle size") {
  CounterRng rng(1, Stream::kNoise);
  Grid<double> fine({64, 64}), coarse({16, 16});
  for (auto& v : fine.values()) v = rng.uniform();
  for (auto& v : coarse.values()) v = rng.uniform();
  CHECK(estimate_grain_px(upsample_nearest(coarse, {64, 64})) > 2.0 * estimate_grain_px(fine));
  CHECK(kernel_for_grain(0.5).wavelength_px == 2.0);
  CHECK(kernel_for_grain(3.0).wavelength_px == 6.0);
  CHECK(kernel_for_grain(3.0).sigma_px == 3.0);
}
