#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ispec/velocity.hpp"

namespace ispec {

// Modulus of continuity on [0, 1/2]: continuous, non-decreasing, m(0) = 0.
//
// Closed-form families are evaluated analytically near 0 (log-log expressions
// are formed from log(1/x) directly, never from catastrophic differences).
// Families built from iterated logarithms are only monotone/concave near the
// origin, so they carry a splice point: the closed form is used on
// (0, splice] and continued linearly (slope matched) up to 1/2.
class Modulus {
 public:
  enum class Family { Power, LogPower, PowerTheta, Custom };

  // x^e, e > 0
  static Modulus power(double exponent);

  // x^s * prod_j (log^{level_j}(1/x))^{-e_j}, levels in {1, 2}.
  // splice < 0 picks the default safe point for the deepest level used.
  static Modulus log_power(double s, std::vector<std::pair<int, double>> factors,
                           double splice = -1.0);

  // x^P * theta(x) with theta = "one" (plain power) or "log-plus"
  // (theta(x) = 1 + log(1/x); requires P large enough to stay monotone).
  static Modulus power_theta(double P, const std::string& theta);

  // Piecewise-linear through tabulated monotone samples; evaluation below the
  // smallest positive sample is refused (DomainExceeded).
  static Modulus custom(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  // x^s * m(x). Power families scale analytically; Custom scales pointwise at
  // its samples.
  Modulus power_scaled(double s) const;

  // Midpoint test m((a+b)/2) >= (m(a)+m(b))/2 - 1e-12 on a log-spaced grid.
  bool is_concave() const;
  // Concave with m(0) = 0 implies subadditive; otherwise grid-checked.
  bool is_subadditive() const;

  Family family() const { return family_; }
  std::string describe() const;

 private:
  Modulus() = default;
  double eval_raw(double x) const;  // closed form, no splice
  void finalize();                  // splice setup + monotonicity validation

  Family family_ = Family::Power;
  double exponent_ = 1.0;                          // Power
  double s_ = 0.0;                                 // LogPower power factor
  std::vector<std::pair<int, double>> factors_;    // LogPower (level, exponent)
  double P_ = 1.0;                                 // PowerTheta
  bool log_plus_ = false;                          // PowerTheta variant
  std::vector<double> xs_, ys_;                    // Custom
  double splice_x_ = 0.0, splice_y_ = 0.0, splice_slope_ = 0.0;
  bool spliced_ = false;
  mutable int concave_cache_ = -1;  // -1 unknown, else 0/1
};

// max over a log-spaced d-grid (>= grid_points points down to d_min) of
// m(d x) / m(d), 0 < x <= 1.
double orderly_profile(const Modulus& m, double x, int grid_points = 240,
                       double d_min = 1e-12);

struct OrderlyReport {
  bool pass = false;
  double final_profile = 0.0;          // profile at the smallest x tested
  double plateau = 0.0;                // largest profile over the tail on FAIL
  std::vector<std::pair<double, double>> table;  // (x, profile)
};
// PASS when the profile falls below 0.1 by x = 1e-6 and trends monotonically
// down along x_seq (5% wiggle allowed). Requires a concave modulus.
OrderlyReport vanishes_orderly(const Modulus& m, std::span<const double> x_seq);
std::vector<double> default_orderly_sequence();

struct ConditionScan {
  struct PerC {
    double c = 0.0;
    double tail_inf = 0.0;    // infimum of the scan value over x <= 1e-6
    double tail_slope = 0.0;  // log-log slope over the tail (positive: decays)
    bool pass = false;
  };
  bool pass = false;
  std::vector<PerC> per_c;
  std::vector<double> grid;                 // scan abscissae
  std::vector<std::vector<double>> values;  // one row per c
};
// Evaluates V(x)/omega(x) * (Omega((1+c)x) - Omega(x)) on a log-spaced grid
// down to 1e-10. PASS per c when the tail infimum stays >= 1e-6 and shows no
// systematic power-law decay (log-log slope <= 0.02). Omega must be concave.
ConditionScan sufficient_condition_scan(const VelocityProfile& V, const Modulus& omega,
                                        const Modulus& Omega, std::span<const double> c_list);

// Multi-scale lower estimate of sup |f_i - f_j| / m(d_ij) over samples on the
// uniform circle grid (adjacent pairs, dyadic separations, random pairs).
struct SeminormPairs {
  int cells = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> inv_mod;  // 1 / m(d) per pair
  static SeminormPairs build(int cells, const Modulus& m, int random_budget,
                             std::uint64_t seed);
  double estimate(std::span<const double> samples) const;
};
double seminorm_estimate(std::span<const double> samples, const Modulus& m,
                         int random_budget, std::uint64_t seed);

}  // namespace ispec
