#include "doctest.h"

#include <fstream>
#include <string>

#include "specklepuf/auth.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/hashing.hpp"
#include "support.hpp"

using namespace specklepuf;
using specklepuf::testing::random_key;
using specklepuf::testing::TempDir;

TEST_CASE("store: enroll and read back") {
  TempDir dir("store");
  CrpStore store(dir.path());
  const auto ch = make_challenge(1, {8, 8}, "ch-1");
  const auto key = random_key({16, 20}, 1);
  const auto rec = store.enroll("puf-a", ch, key, "2024-01-01T00:00:00Z");
  CHECK(rec.enrolled_at == "2024-01-01T00:00:00Z");
  const auto back = store.get("puf-a", "ch-1");
  CHECK(back.key == key);
  CHECK(back.challenge_seed == 1);
  CHECK(back.challenge_dims == Dims{8, 8});
  CHECK(store.contains("puf-a", "ch-1"));
  CHECK_FALSE(store.contains("puf-a", "ch-2"));
  CHECK_THROWS_AS((void)store.get("puf-b", "ch-1"), NotFoundError);
}

TEST_CASE("store: duplicate pair conflicts and leaves the store unchanged") {
  TempDir dir("store");
  CrpStore store(dir.path());
  const auto ch = make_challenge(1, {8, 8}, "ch-1");
  store.enroll("puf-a", ch, random_key({4, 4}, 1));
  CHECK_THROWS_AS(store.enroll("puf-a", ch, random_key({4, 4}, 2)), ConflictError);
  CHECK(store.size() == 1);
  CHECK(store.get("puf-a", "ch-1").key == random_key({4, 4}, 1));
}

TEST_CASE("store: 50 records survive a restart") {
  TempDir dir("store");
  {
    CrpStore store(dir.path());
    for (int i = 0; i < 50; ++i)
      store.enroll("puf-" + std::to_string(i % 5), make_challenge(i, {4, 4}, "ch-" + std::to_string(i)),
                   random_key({8, 8}, i));
    CHECK(store.list().size() == 50);
  }
  CrpStore reopened(dir.path());
  CHECK(reopened.size() == 50);
  CHECK(reopened.get("puf-3", "ch-13").key == random_key({8, 8}, 13));
}

TEST_CASE("store: refresh sees another handle's enrolls") {
  TempDir dir("store");
  CrpStore a(dir.path()), b(dir.path());
  a.enroll("p", make_challenge(1, {4, 4}, "c"), random_key({4, 4}, 1));
  CHECK(b.size() == 0);
  b.refresh();
  CHECK(b.size() == 1);
}

TEST_CASE("store: corrupt index is reported") {
  TempDir dir("store");
  std::ofstream(dir / "index.json") << "{ not json";
  CHECK_THROWS_AS(CrpStore(dir.path()), FormatError);
}

TEST_CASE("verify: accept, reject and errors") {
  TempDir dir("verify");
  CrpStore store(dir.path());
  const auto key = random_key({32, 32}, 5);
  store.enroll("puf", make_challenge(2, {4, 4}, "c"), key);
  const auto same = verify(store, "puf", "c", key, 0.388);
  CHECK(same.hd == 0.0);
  CHECK(same.accept);
  const auto comp = verify(store, "puf", "c", ~key, 0.388);
  CHECK(comp.hd == 1.0);
  CHECK_FALSE(comp.accept);
  const auto fresh = verify(store, "puf", "c", random_key({32, 32}, 6), 0.388);
  CHECK(fresh.hd == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(fresh.accept);
  CHECK_THROWS_AS((void)verify(store, "puf", "d", key, 0.388), NotFoundError);
  CHECK_THROWS_AS((void)verify(store, "puf", "c", random_key({32, 31}, 5), 0.388), ParameterError);
}

TEST_CASE("verify: a simulated remeasurement is accepted") {
  TempDir dir("verify");
  CrpStore store(dir.path());
  const auto puf = mint_puf(12, SurfaceParams{});
  const auto ch = make_challenge(13, {256, 256});
  const GaborKernel k = kernel_for_grain(1.0);
  store.enroll(puf.puf_id, ch, hash_speckle(render_speckle(puf, ch, OpticsConfig{}), k));
  const auto again = hash_speckle(remeasure(puf, ch, OpticsConfig{}, sample_jitter(JitterModel{}, 3, 0)), k);
  const auto d = verify(store, puf.puf_id, ch.challenge_id, again, 0.388);
  CHECK(d.hd < 0.07);
  CHECK(d.accept);
}

TEST_CASE("select_challenge is seeded") {
  TempDir dir("select");
  CrpStore store(dir.path());
  for (int i = 0; i < 10; ++i) store.enroll("p", make_challenge(i, {4, 4}, "c" + std::to_string(i)), random_key({4, 4}, i));
  CHECK(select_challenge(store, "p", 7).challenge_id == select_challenge(store, "p", 7).challenge_id);
  CHECK_THROWS_AS((void)select_challenge(store, "q", 7), NotFoundError);
}

TEST_CASE("far_frr: small exact case") {
  const auto r = far_frr(10, 0.35, 0.01, 0.5);
  CHECK(r.threshold_count == 3);
  CHECK(r.far.value == 0.171875);
}

TEST_CASE("far_frr: operating point and limits") {
  const auto r = far_frr(1'310'720, 0.388, 0.016, 0.499);
  CHECK(r.threshold_count == 508'559);
  CHECK(r.far.log10 < -200.0);
  CHECK(r.frr.log10 < -200.0);
  double prev = 0.0;
  for (double d : {0.2, 0.1, 0.01, 1e-3, 1e-6}) {
    const double frr = far_frr(1000, 0.3, d, 0.5).frr.log10;
    CHECK(frr < prev);
    prev = frr;
  }
  CHECK(far_frr(1000, 0.3, 1e-6, 0.5).frr.value == 0.0);
  const auto printed = far_frr(1000, 0.3, 0.05, 0.5, RateReading::kAsPrinted);
  CHECK(printed.reading == RateReading::kAsPrinted);
}

TEST_CASE("far_frr: ordering must hold") {
  CHECK_THROWS_AS((void)far_frr(100, 0.3, 0.4, 0.5), ParameterError);
  CHECK_THROWS_AS((void)far_frr(100, 0.3, 0.1, 0.2), ParameterError);
  CHECK_THROWS_AS((void)far_frr(0, 0.3, 0.1, 0.5), ParameterError);
}
