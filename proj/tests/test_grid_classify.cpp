#include "ddlab/classify.hpp"
#include "ddlab/error.hpp"
#include "ddlab/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ddlab;

TEST_CASE("axis parsing") {
  const Axis a = parse_axis("log:1:1e7:60");
  CHECK(a.scale == AxisScale::log);
  CHECK(a.count == 60);
  const auto v = a.values();
  CHECK(v.front() == 1.0);
  CHECK(v.back() == 1e7);
  CHECK(v[1] / v[0] == doctest::Approx(std::pow(1e7, 1.0 / 59)));
  const Axis l = parse_axis("lin:0:1:5");
  CHECK(l.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_axis(a.to_string()).values() == v);
}

TEST_CASE("axis errors") {
  CHECK_THROWS_AS(parse_axis("log:0:10:5"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("log:1:10:1"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("lin:5:1:3"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("cubic:1:2:3"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("log:1:10"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("log:1:x:4"), InvalidArgument);
  CHECK_THROWS_AS(parse_axis("log:1:10:2.5"), InvalidArgument);
  try {
    parse_axis("log:0:1:3", "sweep.t_grid");
    FAIL("expected an exception");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("sweep.t_grid") != std::string::npos);
  }
}

TEST_CASE("integer grid drops duplicates") {
  const auto v = parse_axis("log:1:100:20").integer_values();
  CHECK(v.front() == 1);
  CHECK(v.back() == 100);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
  CHECK(v.size() < 20);
}

namespace {

std::vector<double> index_t(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = double(i + 1);
  return t;
}

}  // namespace

TEST_CASE("classify shapes") {
  const std::vector<double> down{9, 8, 7, 6, 5, 4, 3, 2, 1, 0.5};
  CHECK(classify_curve(index_t(10), down).classification == CurveClass::monotone);
  const std::vector<double> vee{9, 7, 5, 3, 1, 2, 4, 6, 8, 9};
  const CurveShape v = classify_curve(index_t(10), vee);
  CHECK(v.classification == CurveClass::single_descent);
  const std::vector<double> dd{9, 6, 3, 2, 4, 5, 3, 1, 0.5, 0.4};
  const CurveShape d = classify_curve(index_t(10), dd);
  CHECK(d.classification == CurveClass::double_descent);
  const std::vector<double> hump{1, 2, 3, 5, 6, 5, 3, 2, 1, 1};
  CHECK(classify_curve(index_t(10), hump).classification == CurveClass::other);
  const std::vector<double> flat(10, 0.3);
  CHECK(classify_curve(index_t(10), flat).classification == CurveClass::monotone);
}

TEST_CASE("classify ignores single-point spikes and small wiggles") {
  const std::vector<double> spike{9, 8, 7, 6, 9.5, 5, 4, 3, 2, 1};
  CHECK(classify_curve(index_t(10), spike).classification == CurveClass::monotone);
  const std::vector<double> wiggle{9, 8, 7, 6, 5, 5.001, 5.002, 4, 3, 2};
  CHECK(classify_curve(index_t(10), wiggle, 0.01).classification == CurveClass::monotone);
}

TEST_CASE("classify is invariant to rescaling") {
  const std::vector<double> dd{9, 6, 3, 2, 4, 5, 3, 1, 0.5, 0.4};
  std::vector<double> scaled;
  for (const double x : dd) scaled.push_back(1e-6 * x);
  const CurveShape a = classify_curve(index_t(10), dd);
  const CurveShape b = classify_curve(index_t(10), scaled);
  CHECK(a.classification == b.classification);
  REQUIRE(a.extrema.size() == b.extrema.size());
  for (std::size_t i = 0; i < a.extrema.size(); ++i) CHECK(a.extrema[i].index == b.extrema[i].index);
}

TEST_CASE("classify preconditions") {
  const std::vector<double> few{3, 2, 1};
  CHECK_THROWS_AS(classify_curve(index_t(3), few), InvalidArgument);
  std::vector<double> t = index_t(10);
  t[4] = t[3];
  CHECK_THROWS_AS(classify_curve(t, std::vector<double>(10, 1.0)), InvalidArgument);
}
