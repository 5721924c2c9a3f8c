#pragma once

#include <span>
#include <string>
#include <vector>

namespace ddlab {

enum class CurveClass { monotone, single_descent, double_descent, other };

std::string to_string(CurveClass c);

struct Extremum {
  int index = 0;
  double t = 0.0;
  double value = 0.0;
  bool is_max = false;
};

struct CurveShape {
  CurveClass classification = CurveClass::monotone;
  std::vector<Extremum> extrema;  ///< turning points of the smoothed curve, in order
};

/// Shape of a learning curve L_G(t). The values are median-smoothed over 3
/// points, then turning points are taken wherever the curve reverses by at
/// least prominence * (max - min). A curve that first falls counts its
/// minima (the last point included): one is a single descent, two a double
/// descent. Anything that rises first, or has more minima, is `other`.
/// Needs at least 8 points with t strictly increasing.
CurveShape classify_curve(std::span<const double> t, std::span<const double> loss,
                          double prominence = 0.01);

}  // namespace ddlab
