#pragma once

#include <cstdint>
#include <vector>

#include "ispec/rng.hpp"
#include "ispec/transfer.hpp"

namespace ispec {

// sum_i phi(node_i) mu_i
double equilibrium_integral(const Observable& phi, std::span<const double> mu);

// C(n) = integral(psi . L_{f~}^n phi dmu) - integral(phi dmu) integral(psi dmu)
// for n = 0..n_max (the operator applies to the non-composed factor; operator
// powers are reused incrementally across n).
std::vector<double> correlation_series(const OperatorBundle& b, const Observable& phi,
                                       const Observable& psi, int n_max);

// Direct orbit-quadrature estimate of integral(phi . psi∘T^n dmu), composing T
// forward on the nodes; independent of the operator path.
double correlation_direct(const OperatorBundle& b, const Observable& phi,
                          const Observable& psi, int n);

struct DecayReport {
  double K = 0.0;
  double rho = 0.0;
  double r2 = 0.0;
  bool pass = false;  // rho <= 1 - 1e-3 and r2 >= 0.9
  int fit_points = 0;
  int floor_n = 0;           // first n with |C(n)| at the noise floor
  double noise_floor = 0.0;  // estimated (or supplied) quadrature noise
};
// Least squares of log |C(n)| against n on points above the noise floor
// (floor <= 0 requests the automatic plateau estimate). Throws
// InsufficientSignal when fewer than 5 points qualify.
DecayReport decay_fit(const std::vector<double>& corr, double noise_floor = -1.0);

// Inverse-CDF draws from the piecewise-constant cell density mu.
std::vector<double> sample_equilibrium(const Grid& grid, std::span<const double> mu,
                                       int count, std::uint64_t seed);

// mu-stationary orbit segments realized backwards: from x_0 ~ mu, draw
// preimages with probabilities e^{f~(y)} over y in T^{-1}(x) (they sum to one
// since L_{f~} 1 = 1). The reversed chain is a genuine T-orbit, so Birkhoff
// sums along it are distributed as S_n phi under mu. Forward floating-point
// orbits would instead equidistribute to the physical measure (when one
// exists), which is not the equilibrium state of the weighted operator; for
// the doubling oracle they also collapse onto 0 within one mantissa length.
// Branch preimages and weights are interpolated from per-cell-edge tables.
class EquilibriumOrbitSampler {
 public:
  explicit EquilibriumOrbitSampler(const OperatorBundle& b);
  // one backward step from x using the random stream
  double step(double x, Rng& rng) const;
  // Birkhoff average along one stationary chain (burn-in included); the
  // callable form avoids interpolation smearing for observables with a
  // wraparound jump (e.g. phi(x) = x)
  double chain_average(const std::function<double(double)>& phi, double start, long steps,
                       Rng& rng) const;
  double chain_average(const Observable& phi, double start, long steps, Rng& rng) const;

 private:
  int m_;
  int branches_;
  std::vector<double> edge_pre_;  // preimage of cell edge i/m per branch
  std::vector<double> edge_w_;    // e^{f~} at those preimages
};

struct CLTReport {
  int n_orbit = 0;
  int n_samples = 0;
  double gamma_gk = 0.0;   // Green-Kubo sqrt(C(0) + 2 sum C(n))
  double gamma_fit = 0.0;  // sample standard deviation of the normalized sums
  double ks = 0.0;         // KS distance to Normal(0, gamma_gk^2)
  bool pass = false;       // ks < 0.05
  std::vector<double> sums;  // normalized Birkhoff sums per sample
};
// Distribution of S_n(phi - mean) / sqrt(n) over mu-stationary orbit segments.
// Throws DegenerateVariance when gamma_gk^2 < 1e-10.
CLTReport clt_test(const OperatorBundle& b, const Observable& phi, int n_orbit,
                   int n_samples, std::uint64_t seed);

struct MixingTable {
  std::vector<double> centered;  // |C(n)|, n = 0..n_max
  double tail_max = 0.0;         // max over n in [n_max/2, n_max]
  double threshold = 0.0;        // 10x estimated quadrature noise
  bool converged = false;
};
MixingTable mixing_check(const OperatorBundle& b, const Observable& phi,
                         const Observable& psi, int n_max);

}  // namespace ispec
