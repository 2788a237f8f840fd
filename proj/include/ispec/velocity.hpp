#pragma once

#include <string>
#include <vector>

namespace ispec {

enum class VelocityFamily { ManevillePomeau, SlowlyVarying, PowerTimesLog, Custom };

// Velocity profile V of the circle map T(x) = x (1 + V(x)) mod 1.
//
// V is continuous and non-decreasing on [0, 1] with V(1) a positive integer;
// it is strictly increasing unless `allow_flat` is set (constant profiles are
// admitted only as analytic test oracles, e.g. V == 1 gives the doubling map).
// `sigma` is the regular-variation index of V at 0.
struct VelocityProfile {
  VelocityFamily family = VelocityFamily::ManevillePomeau;
  double sigma = 0.0;
  int v1 = 1;  // V(1)
  bool allow_flat = false;

  // Manneville-Pomeau: V(x) = x^q
  double q = 1.0;

  // Slowly varying: V(x) = A / log^k(1/x) near 0 (log^k = k-fold composition),
  // continued linearly from the splice point up to V(1) = 1.
  int k = 1;
  double A = 1.0;
  double splice_x = 0.0;
  double splice_v = 0.0;
  double splice_slope = 0.0;

  // Power-times-log: V(x) = x^sigma * L(x) with L slowly varying;
  // variant "damped":  L(x) = 1 / (1 + log(1/x))
  // variant "sqrtexp": L(x) = exp(-sqrt(log(1/x)))
  std::string variant = "damped";

  // Custom: monotone-cubic interpolation through tabulated samples.
  std::vector<double> xs, vs;
  std::vector<double> slopes;  // PCHIP slopes at the samples

  static VelocityProfile manneville_pomeau(double q);
  static VelocityProfile slowly_varying(int k, double A);
  static VelocityProfile power_times_log(double sigma, const std::string& variant);
  static VelocityProfile custom(std::vector<double> xs, std::vector<double> vs,
                                bool allow_flat = false);
  // V == c on [0, 1]; c = 1 is the doubling map oracle.
  static VelocityProfile flat_oracle(int c = 1);

  double operator()(double x) const;

  bool is_flat() const;
  // Integer expansion slope of a flat-profile map (1 + V), used by the exact
  // digit-stream orbit sampler; 0 when the profile is not flat.
  int flat_slope() const;

  std::string describe() const;
};

}  // namespace ispec
