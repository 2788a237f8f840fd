#include "ispec/potential.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ispec/errors.hpp"

namespace ispec {

Potential Potential::zero() { return Potential(); }

Potential Potential::cosine(double amplitude) {
  Potential p;
  p.kind_ = Kind::CosineScaled;
  p.amplitude_ = amplitude;
  return p;
}

Potential Potential::modulus_cone(double center, double scale, Modulus omega) {
  if (center < 0 || center >= 1) throw ConfigError("cone center must lie in [0, 1)");
  Potential p;
  p.kind_ = Kind::ModulusCone;
  p.center_ = center;
  p.scale_ = scale;
  p.cone_ = std::make_shared<const Modulus>(std::move(omega));
  return p;
}

Potential Potential::custom(std::function<double(double)> f, std::string label) {
  Potential p;
  p.kind_ = Kind::Custom;
  p.fn_ = std::move(f);
  p.label_ = std::move(label);
  return p;
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::CosineScaled:
      return amplitude_ * std::cos(2.0 * std::numbers::pi * x);
    case Kind::ModulusCone:
      return scale_ * (*cone_)(circle_dist(x, center_));
    case Kind::Custom:
      return fn_(x);
  }
  return 0.0;
}

std::string Potential::describe() const {
  char buf[160];
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::CosineScaled:
      std::snprintf(buf, sizeof buf, "cosine(amplitude=%g)", amplitude_);
      return buf;
    case Kind::ModulusCone:
      std::snprintf(buf, sizeof buf, "modulus-cone(center=%g, scale=%g, %s)", center_, scale_,
                    cone_->describe().c_str());
      return buf;
    case Kind::Custom:
      return label_;
  }
  return "?";
}

std::optional<double> Potential::seminorm_hint(const Modulus& omega) const {
  if (kind_ == Kind::Zero) return 0.0;
  if (kind_ == Kind::ModulusCone && cone_->describe() == omega.describe() &&
      omega.is_subadditive())
    return std::fabs(scale_);
  return std::nullopt;
}

double NormalizedPotential::operator()(double x) const {
  return base(x) + std::log(h(x)) - std::log(h(map.eval(x))) - std::log(chi);
}

}  // namespace ispec
