#include "ispec/fit.hpp"

#include <algorithm>
#include <cmath>

namespace ispec {

double plateau_floor(const std::vector<double>& values) {
  if (values.empty()) return 1e-15;
  std::size_t lo = values.size() - std::max<std::size_t>(values.size() / 4, 3);
  if (lo >= values.size()) lo = 0;
  std::vector<double> tail;
  for (std::size_t i = lo; i < values.size(); ++i) tail.push_back(std::fabs(values[i]));
  std::sort(tail.begin(), tail.end());
  return std::max(1e-15, 2.0 * tail[tail.size() / 2]);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit out;
  out.n = x.size();
  if (x.size() != y.size() || x.size() < 2) return out;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (out.intercept + out.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace ispec
