#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ispec/grid.hpp"
#include "ispec/map.hpp"
#include "ispec/modulus.hpp"
#include "ispec/potential.hpp"

namespace ispec {

// Matrix-free collocation of the transfer operator
//   (L_f phi)(x) = sum_{y in T^{-1}(x)} e^{f(y)} phi(y)
// at the grid nodes. Branch preimages of every node are solved once; phi is
// interpolated at them, f is evaluated exactly.
class TransferOperator {
 public:
  TransferOperator(const CircleMap& map, const Grid& grid);

  // e^{log_weight(y)} per (branch, node), flattened branch-major.
  std::vector<double> weights(const std::function<double(double)>& log_weight) const;

  Observable apply(const Observable& phi, const std::vector<double>& weights) const;
  ComplexObservable apply(const ComplexObservable& phi, const std::vector<double>& weights) const;

  const Grid& grid() const { return grid_; }
  int branches() const { return branches_; }
  double preimage(int branch, int node) const { return pre_[branch * grid_.m + node]; }

 private:
  Grid grid_;
  int branches_;
  std::vector<double> pre_;   // preimage points
  std::vector<int> idx_;      // interpolation base index
  std::vector<double> frac_;  // interpolation fraction
};

// Sparse Ulam discretization. rows index target cells i, entries (j, w) weigh
// source cells j by e^{f(y*)} times M * |T(cell_j ∩ T^{-1}(cell_i))|, the
// sub-interval measure taken exactly from the lift. Summing a row over its
// sources gives exactly N per branch-partition of unity when f = 0. Used for
// the eigenmeasure (adjoint iteration) and as an eigenvalue cross-check.
struct UlamMatrix {
  int m = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;

  std::vector<double> apply(const std::vector<double>& v) const;            // A v
  std::vector<double> apply_transpose(const std::vector<double>& v) const;  // A^T v
  double row_sum(int i) const;
  double column_sum(int j) const;
};
UlamMatrix ulam_matrix(const CircleMap& map, const Potential& f, const Grid& grid);

// Leading eigendata of L_f: eigenvalue chi with positive eigenfunction h
// (collocation power iteration from 1), eigenmeasure nu (adjoint Ulam
// iteration), equilibrium weights mu = h * nu, normalized to
// integral(h dnu) = 1 and sum(mu) = 1.
struct RPFData {
  double chi = 0.0;
  double pressure = 0.0;  // log chi
  Observable h;
  std::vector<double> nu;
  std::vector<double> mu;
  double residual = 0.0;  // ||L_f h - chi h||_inf / chi
  double chi_ulam = 0.0;
  double chi_aitken = 0.0;
  int iterations = 0;
  int ulam_iterations = 0;
};

RPFData leading_eigendata(const CircleMap& map, const Potential& f, const Grid& grid,
                          double tol = 1e-12, int max_iter = 100000);

NormalizedPotential normalize_potential(const CircleMap& map, const Potential& f,
                                        const RPFData& rpf);

// ||L_{f~} 1 - 1||_inf over the nodes.
double check_normalization(const CircleMap& map, const NormalizedPotential& ftilde,
                           const Grid& grid);

// Samples pairs with d < rho_1 and reports the worst violation of
// h(x) <= h(y) exp(kappa_f * Omega(d(x, y))).
struct ConeReport {
  double worst_log_violation = 0.0;  // max over pairs of |log h(x)-log h(y)| - kappa*Omega(d)
  double worst_multiplicative = 1.0;
  long pairs = 0;
  double worst_x = 0.0, worst_y = 0.0;
};
ConeReport cone_membership(const Observable& h, double kappa_f, const Modulus& Omega,
                           double rho_1, int pair_budget, std::uint64_t seed);

// Everything downstream stages need from one (map, potential, grid) triple.
struct OperatorBundle {
  CircleMap map;
  Grid grid;
  Potential f;
  RPFData rpf;
  NormalizedPotential ftilde;
  TransferOperator op;
  std::vector<double> w_f;            // weights of L_f
  std::vector<double> w_tilde;        // weights of L_{f~}
  std::vector<double> w_theta;        // weights of L_{f - log(1+V)}
  std::vector<double> w_theta_tilde;  // weights of L_{f~ - log(1+V)}
  double normalization_residual = 0.0;
};
OperatorBundle make_bundle(const CircleMap& map, const Potential& f, const Grid& grid,
                           double tol = 1e-12, int max_iter = 100000);

// Bundle around already-computed eigendata (e.g. reloaded from artifacts).
OperatorBundle assemble_bundle(const CircleMap& map, const Potential& f, const Grid& grid,
                               RPFData rpf);

}  // namespace ispec
