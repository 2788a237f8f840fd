#pragma once

#include <cstddef>
#include <vector>

namespace ispec {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  std::size_t n = 0;
};

// Ordinary least squares y ~ slope*x + intercept with coefficient of
// determination. A constant y series fits exactly (r2 = 1).
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Plateau level of |values| over the trailing quarter (median times two),
// floored at 1e-15; estimates where a decaying sequence hits numerical noise.
double plateau_floor(const std::vector<double>& values);

}  // namespace ispec
