#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ispec/circle.hpp"

namespace ispec {

// Uniform cells on the circle; nodes are the cell midpoints.
struct Grid {
  int m = 0;

  explicit Grid(int cells);

  double node(int i) const { return (i + 0.5) / m; }
  double cell_left(int i) const { return static_cast<double>(i) / m; }
  double width() const { return 1.0 / m; }
};

// Real observable sampled at the grid nodes with wraparound-aware linear
// interpolation between adjacent nodes.
class Observable {
 public:
  Observable(Grid grid, std::vector<double> samples);
  static Observable constant(const Grid& grid, double value);
  static Observable from_function(const Grid& grid, const std::function<double(double)>& f);

  double operator()(double x) const;

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.m; }
  std::span<const double> samples() const { return samples_; }
  std::vector<double>& data() { return samples_; }
  const std::vector<double>& data() const { return samples_; }
  double& operator[](int i) { return samples_[i]; }
  double operator[](int i) const { return samples_[i]; }

  double sup_norm() const;
  double min_value() const;
  double max_value() const;

 private:
  Grid grid_;
  std::vector<double> samples_;
};

// Componentwise pair of real observables (complex mode).
struct ComplexObservable {
  Observable re, im;
};

// Quadrature against per-cell weights (a discrete measure).
double integrate(const Observable& phi, std::span<const double> weights);
double integrate(std::span<const double> samples, std::span<const double> weights);

}  // namespace ispec
