#pragma once

#include <cmath>

namespace ispec {

// Wrap a real number into [0, 1).
inline double wrap_unit(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

// Circle metric d(x, y) = min{|x - y|, 1 - |x - y|} for x, y in [0, 1).
inline double circle_dist(double x, double y) {
  double g = std::fabs(x - y);
  return g <= 0.5 ? g : 1.0 - g;
}

// Signed displacement from x to the nearest representative of y, in (-1/2, 1/2].
inline double circle_delta(double x, double y) {
  double d = y - x;
  if (d > 0.5) d -= 1.0;
  if (d <= -0.5) d += 1.0;
  return d;
}

}  // namespace ispec
