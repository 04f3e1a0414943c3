#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "regen/random.hpp"
#include "regen/statistics.hpp"

using namespace regen;

TEST_SUITE("random") {

TEST_CASE("Philox known-answer vector") {
  // Random123 kat_vectors: philox4x32 10 rounds, counter 0, key 0.
  Philox4x32 g(0, 0);
  CHECK(g() == 0x6627e8d5u);
  CHECK(g() == 0xe169c58du);
  CHECK(g() == 0xbc57ac4cu);
  CHECK(g() == 0x9b00dbd8u);
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
  }
}

TEST_CASE("discard matches drawing") {
  Philox4x32 a(5, 5), b(5, 5);
  for (int i = 0; i < 40; ++i) a();
  b.discard_blocks(10);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("derived stream ids do not collide") {
  std::set<std::uint64_t> seen;
  for (const char* kind : {"clt", "lil", "bm_lil", "validate"})
    for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(derive_stream_id(kind, i));
  CHECK(seen.size() == 4 * 5000);
}

TEST_CASE("variates have the right moments") {
  RandomStream r(1, 1);
  const int N = 200000;
  std::vector<double> u(N), e(N), z(N);
  for (int i = 0; i < N; ++i) {
    u[i] = r.uniform();
    e[i] = r.exponential();
    z[i] = r.normal();
    CHECK(u[i] >= 0.0);
    CHECK(u[i] < 1.0);
  }
  CHECK(std::abs(sample_mean(u) - 0.5) < 4 * std::sqrt(1.0 / 12 / N));
  CHECK(std::abs(sample_mean(e) - 1.0) < 4 * std::sqrt(1.0 / N));
  CHECK(std::abs(sample_variance(z) - 1.0) < 4 * std::sqrt(2.0 / N));
  CHECK(ks_statistic(z, 1.0).pass_1pct);
}

}  // TEST_SUITE
