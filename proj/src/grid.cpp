#include "ispec/grid.hpp"

#include <algorithm>
#include <cmath>

#include "ispec/errors.hpp"

namespace ispec {

Grid::Grid(int cells) : m(cells) {
  if (cells < 16) throw ConfigError("grid needs at least 16 cells");
}

Observable::Observable(Grid grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.m)
    throw ConfigError("observable sample count does not match the grid");
}

Observable Observable::constant(const Grid& grid, double value) {
  return Observable(grid, std::vector<double>(grid.m, value));
}

Observable Observable::from_function(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> s(grid.m);
  for (int i = 0; i < grid.m; ++i) s[i] = f(grid.node(i));
  return Observable(grid, std::move(s));
}

double Observable::operator()(double x) const {
  const int m = grid_.m;
  double p = x * m - 0.5;
  double fl = std::floor(p);
  double t = p - fl;
  int i = static_cast<int>(fl) % m;
  if (i < 0) i += m;
  int j = i + 1 == m ? 0 : i + 1;
  return (1.0 - t) * samples_[i] + t * samples_[j];
}

double Observable::sup_norm() const {
  double s = 0;
  for (double v : samples_) s = std::max(s, std::fabs(v));
  return s;
}

double Observable::min_value() const { return *std::min_element(samples_.begin(), samples_.end()); }
double Observable::max_value() const { return *std::max_element(samples_.begin(), samples_.end()); }

double integrate(std::span<const double> samples, std::span<const double> weights) {
  double s = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += samples[i] * weights[i];
  return s;
}

double integrate(const Observable& phi, std::span<const double> weights) {
  return integrate(phi.samples(), weights);
}

}  // namespace ispec
