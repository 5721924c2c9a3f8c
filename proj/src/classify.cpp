#include "ddlab/classify.hpp"

#include "ddlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace ddlab {

std::string to_string(CurveClass c) {
  switch (c) {
    case CurveClass::monotone: return "monotone";
    case CurveClass::single_descent: return "single_descent";
    case CurveClass::double_descent: return "double_descent";
    case CurveClass::other: return "other";
  }
  return "other";
}

CurveShape classify_curve(std::span<const double> t, std::span<const double> loss,
                          double prominence) {
  const std::size_t n = loss.size();
  if (t.size() != n) throw InvalidArgument("classify_curve: t and loss differ in length");
  if (n < 8) throw InvalidArgument("classify_curve: need at least 8 points");
  if (!(prominence > 0.0)) throw InvalidArgument("classify_curve: prominence must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(loss[i])) throw InvalidArgument("classify_curve: non-finite loss value");
    if (i > 0 && !(t[i] > t[i - 1])) throw InvalidArgument("classify_curve: t must increase");
  }

  std::vector<double> v(loss.begin(), loss.end());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double w[3] = {loss[i - 1], loss[i], loss[i + 1]};
    std::sort(w, w + 3);
    v[i] = w[1];
  }

  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double h = prominence * (*hi_it - *lo_it);
  CurveShape shape;
  if (!(h > 0.0)) return shape;

  auto make = [&](std::size_t i, bool is_max) {
    return Extremum{static_cast<int>(i), t[i], v[i], is_max};
  };

  // Hysteresis zigzag: a turning point is confirmed once the curve has moved
  // h away from it in the opposite direction.
  int dir = 0;
  std::size_t ext = 0, lo = 0, hi = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (dir == 0) {
      if (v[i] > v[hi]) hi = i;
      if (v[i] < v[lo]) lo = i;
      if (v[hi] - v[i] >= h) {
        shape.extrema.push_back(make(hi, true));
        dir = -1;
        ext = i;
      } else if (v[i] - v[lo] >= h) {
        shape.extrema.push_back(make(lo, false));
        dir = 1;
        ext = i;
      }
    } else if (dir > 0) {
      if (v[i] > v[ext]) {
        ext = i;
      } else if (v[ext] - v[i] >= h) {
        shape.extrema.push_back(make(ext, true));
        dir = -1;
        ext = i;
      }
    } else {
      if (v[i] < v[ext]) {
        ext = i;
      } else if (v[i] - v[ext] >= h) {
        shape.extrema.push_back(make(ext, false));
        dir = 1;
        ext = i;
      }
    }
  }
  if (dir != 0) shape.extrema.push_back(make(ext, dir > 0));

  // Only the start and end points: no reversal.
  if (shape.extrema.size() <= 2) {
    shape.classification = CurveClass::monotone;
    return shape;
  }
  if (!shape.extrema.front().is_max) {
    shape.classification = CurveClass::other;
    return shape;
  }
  const auto minima = std::count_if(shape.extrema.begin(), shape.extrema.end(),
                                    [](const Extremum& e) { return !e.is_max; });
  shape.classification = minima == 1   ? CurveClass::single_descent
                         : minima == 2 ? CurveClass::double_descent
                                       : CurveClass::other;
  return shape;
}

}  // namespace ddlab
