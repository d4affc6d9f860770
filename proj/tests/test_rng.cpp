#include <cmath>
#include <vector>

#include "doctest.h"
#include "rng.hpp"

using namespace agenet;

TEST_CASE("same seed reproduces every draw") {
  Rng a(123), b(123);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform_int(0, 17) == b.uniform_int(0, 17));
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.uniform() == b.uniform()) ++same;
  CHECK(same < 5);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 0) != mix_seed(43, 0));
  CHECK(mix_seed(42, 7) == mix_seed(42, 7));
}

TEST_CASE("uniform stays in [0,1)") {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform(lo,hi) covers the interval") {
  Rng rng(11);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(2.0, 5.0);
    CHECK(v >= 2.0);
    CHECK(v < 5.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < 2.05);
  CHECK(hi > 4.95);
}

TEST_CASE("uniform_int is inclusive and roughly uniform") {
  Rng rng(13);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const int v = rng.uniform_int(10, 15);
    REQUIRE(v >= 10);
    REQUIRE(v <= 15);
    ++counts[static_cast<std::size_t>(v - 10)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("normal moments") {
  Rng rng(17);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("categorical follows the weights") {
  Rng rng(19);
  const std::vector<double> w{1.0, 3.0, 6.0};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 100000; ++i) ++counts[rng.categorical(w)];
  CHECK(std::abs(counts[0] / 100000.0 - 0.1) < 0.01);
  CHECK(std::abs(counts[1] / 100000.0 - 0.3) < 0.015);
  CHECK(std::abs(counts[2] / 100000.0 - 0.6) < 0.015);
}

TEST_CASE("categorical rejects bad weights") {
  Rng rng(23);
  CHECK_THROWS(rng.categorical({}));
  CHECK_THROWS(rng.categorical({1.0, -0.5}));
  CHECK_THROWS(rng.categorical({0.0, 0.0}));
}
