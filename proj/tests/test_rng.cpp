#include "ddlab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ddlab;

TEST_CASE("counter rng is a pure function of its key") {
  CounterRng a(42, Stream::inputs), b(42, Stream::inputs);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CounterRng c(42, Stream::teacher);
  CounterRng d(42, Stream::inputs);
  CHECK(c() != d());
}

TEST_CASE("hash64 is order sensitive") {
  CHECK(hash64(1, 2) != hash64(2, 1));
  CHECK(hash64(1, 2, 3) != hash64(1, 3, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(hash64(7, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform stays inside the open interval") {
  CounterRng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit moments") {
  CounterRng r(11, Stream::label_noise);
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s4 / n - 3.0) < 0.1);
}
