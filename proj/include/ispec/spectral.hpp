#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ispec/modulus.hpp"
#include "ispec/transfer.hpp"

namespace ispec {

// theta(n) = chi^{-n} || L_{f - log(1+V)}^n 1 ||_inf for n = 0..n_max,
// computed with per-step sup renormalization on an accumulated log scale.
std::vector<double> theta_series(const OperatorBundle& b, int n_max);

// tau(n) = sup_{0 < d < 1/2} Omega(theta_n d) / Omega(d); requires theta_n in [0, 1].
double tau_from_theta(const Modulus& Omega, double theta_n, int grid_points = 240,
                      double d_min = 1e-12);

// Pointwise-decay table of g_n = L_{f~ - log(1+V)}^n 1: strict decrease at
// every node plus the sup-norm sequence.
struct ThetaLimitTable {
  std::vector<double> sup_norms;  // n = 0..n_max
  bool strictly_decreasing = true;
  int first_violation_n = -1;
};
ThetaLimitTable theta_limit_check(const OperatorBundle& b, int n_max);

// Standard battery of centered test observables: low Fourier modes, modulus
// cones at three centers, one seeded smoothed random field.
struct TestObservable {
  std::string name;
  Observable phi;
  double sup = 0.0;       // ||phi||_inf on the grid
  double seminorm = 0.0;  // |phi|_Omega estimate
};
std::vector<TestObservable> observable_battery(const Grid& grid, const Modulus& Omega,
                                               std::uint64_t seed);

struct DFLYOptions {
  std::vector<int> n_list = {1, 2, 4, 8};
  int pair_budget = 10000;
  std::uint64_t seed = 1;
  double slack_tol = 1e-9;
};

// Pointwise inequality
//   |L_{f~}^n phi(x) - L_{f~}^n phi(y)|
//     <= Gamma ( |phi|_Omega Omega(theta(n) d) + ||phi||_inf Omega(d) )
// over sampled pairs with d < rho_1 and the observable battery.
// gamma_empirical is the smallest constant fitting all samples;
// gamma_paper = max{ 2 kappa_f e^{2 kappa_f Omega(1/2)}, ceil(max h / min h) }.
struct DFLYReport {
  std::vector<int> n_values;
  std::vector<double> theta;  // theta(n) for n in n_values
  std::vector<double> tau;    // tau(n) for n in n_values
  double gamma_empirical = 0.0;
  double gamma_paper = 0.0;
  long violations = 0;
  long pairs_tested = 0;
  double kappa_f = 0.0;
  double h_ratio = 0.0;  // max h / min h
  bool theta_nonincreasing = true;
};
DFLYReport dfly_check(const OperatorBundle& b, const Modulus& Omega, double kappa_f,
                      double rho_1, const DFLYOptions& opt);

struct GapOptions {
  int n_max = 40;
  std::uint64_t seed = 1;
  double noise_floor = 1e-11;
  int seminorm_budget = 8000;
};

struct GapTrack {
  std::string name;
  std::vector<double> norms;  // ||L^n phi||_Omega, n = 0..n_max
  double rho = 0.0;
  double r2 = 1.0;
  int fit_points = 0;
  bool annihilated = false;          // collapsed below the noise floor at once
  bool contracted_two_thirds = false;  // some n with norm <= 2/3
};

// Decay of || L_{f~}^n phi ||_Omega = ||.||_inf + |.|_Omega over the battery,
// each observable centered (mu-mean zero) and normalized to unit Omega-norm.
// rho_hat is exp of the fitted tail slope, maximized over the battery.
// Throws SeminormBlowup when a seminorm grows past 10x its start.
struct GapEstimate {
  double rho_hat = 0.0;
  double r2 = 1.0;  // worst fitted r2 over the battery
  bool pass = false;
  std::vector<GapTrack> tracks;
};
GapEstimate gap_estimate(const OperatorBundle& b, const Modulus& Omega, const GapOptions& opt);

}  // namespace ispec
