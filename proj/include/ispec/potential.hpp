#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ispec/grid.hpp"
#include "ispec/map.hpp"
#include "ispec/modulus.hpp"

namespace ispec {

// Potential f on the circle, evaluable exactly at arbitrary points.
class Potential {
 public:
  enum class Kind { Zero, CosineScaled, ModulusCone, Custom };

  static Potential zero();
  static Potential cosine(double amplitude);
  // f(x) = scale * omega(d(x, center))
  static Potential modulus_cone(double center, double scale, Modulus omega);
  static Potential custom(std::function<double(double)> f, std::string label = "custom");

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  std::string describe() const;

  // Analytic |f|_omega when the claimed modulus matches the construction
  // (zero potential, or a cone over a concave modulus); nullopt otherwise.
  std::optional<double> seminorm_hint(const Modulus& omega) const;

 private:
  Kind kind_ = Kind::Zero;
  double amplitude_ = 0.0;
  double center_ = 0.0, scale_ = 0.0;
  std::shared_ptr<const Modulus> cone_;
  std::function<double(double)> fn_;
  std::string label_;
};

// f~ = f + log h - log h o T - log chi; evaluating h by grid interpolation.
struct NormalizedPotential {
  CircleMap map;
  Potential base;
  Observable h;
  double chi;

  double operator()(double x) const;
};

}  // namespace ispec
