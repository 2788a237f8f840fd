#include "ispec/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ispec/errors.hpp"
#include "ispec/rng.hpp"

namespace ispec {

TransferOperator::TransferOperator(const CircleMap& map, const Grid& grid)
    : grid_(grid), branches_(map.branch_count) {
  const int m = grid_.m;
  pre_.resize(static_cast<std::size_t>(branches_) * m);
  idx_.resize(pre_.size());
  frac_.resize(pre_.size());
  for (int b = 0; b < branches_; ++b) {
    for (int i = 0; i < m; ++i) {
      double y = inverse_branch(map, grid_.node(i), b);
      std::size_t k = static_cast<std::size_t>(b) * m + i;
      pre_[k] = y;
      double p = y * m - 0.5;
      double fl = std::floor(p);
      int base = static_cast<int>(fl) % m;
      if (base < 0) base += m;
      idx_[k] = base;
      frac_[k] = p - fl;
    }
  }
}

std::vector<double> TransferOperator::weights(
    const std::function<double(double)>& log_weight) const {
  std::vector<double> w(pre_.size());
  for (std::size_t k = 0; k < pre_.size(); ++k) w[k] = std::exp(log_weight(pre_[k]));
  return w;
}

Observable TransferOperator::apply(const Observable& phi, const std::vector<double>& weights) const {
  const int m = grid_.m;
  const auto& s = phi.data();
  std::vector<double> out(m, 0.0);
  for (int b = 0; b < branches_; ++b) {
    const std::size_t off = static_cast<std::size_t>(b) * m;
    for (int i = 0; i < m; ++i) {
      std::size_t k = off + i;
      int j = idx_[k];
      int j1 = j + 1 == m ? 0 : j + 1;
      out[i] += weights[k] * ((1.0 - frac_[k]) * s[j] + frac_[k] * s[j1]);
    }
  }
  return Observable(grid_, std::move(out));
}

ComplexObservable TransferOperator::apply(const ComplexObservable& phi,
                                          const std::vector<double>& weights) const {
  return {apply(phi.re, weights), apply(phi.im, weights)};
}

std::vector<double> UlamMatrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (auto& [j, w] : rows[i]) out[i] += w * v[j];
  return out;
}

std::vector<double> UlamMatrix::apply_transpose(const std::vector<double>& v) const {
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (auto& [j, w] : rows[i]) out[j] += w * v[i];
  return out;
}

double UlamMatrix::row_sum(int i) const {
  double s = 0;
  for (auto& [j, w] : rows[i]) s += w;
  return s;
}

double UlamMatrix::column_sum(int j) const {
  double s = 0;
  for (int i = 0; i < m; ++i)
    for (auto& [jj, w] : rows[i])
      if (jj == j) s += w;
  return s;
}

UlamMatrix ulam_matrix(const CircleMap& map, const Potential& f, const Grid& grid) {
  const int m = grid.m;
  UlamMatrix A;
  A.m = m;
  A.rows.resize(m);
  for (int b = 0; b < map.branch_count; ++b) {
    // branch preimages of the cell edges; shared between adjacent cells
    std::vector<double> edge(m + 1);
    edge[0] = map.endpoints[b];
    edge[m] = map.endpoints[b + 1];
    for (int i = 1; i < m; ++i) edge[i] = inverse_branch(map, grid.cell_left(i), b);
    for (int i = 0; i < m; ++i) {
      double yl = edge[i], yr = edge[i + 1];
      int jl = std::clamp(static_cast<int>(std::floor(yl * m)), 0, m - 1);
      int jr = std::clamp(static_cast<int>(std::floor(yr * m - 1e-15)), jl, m - 1);
      for (int j = jl; j <= jr; ++j) {
        double lo = std::max(yl, grid.cell_left(j));
        double hi = std::min(yr, grid.cell_left(j) + grid.width());
        if (hi <= lo) continue;
        double mass = map.lift(hi) - map.lift(lo);  // exact image measure
        double rep = 0.5 * (lo + hi);
        A.rows[i].emplace_back(j, std::exp(f(rep)) * m * mass);
      }
    }
  }
  return A;
}

namespace {

double aitken(double a, double b, double c) {
  double d2 = (c - b) - (b - a);
  if (std::fabs(d2) < 1e-300) return c;
  return c - (c - b) * (c - b) / d2;
}

}  // namespace

RPFData leading_eigendata(const CircleMap& map, const Potential& f, const Grid& grid,
                          double tol, int max_iter) {
  if (tol < 1e-12) tol = 1e-12;
  TransferOperator op(map, grid);
  auto w = op.weights([&f](double y) { return f(y); });

  Observable phi = Observable::constant(grid, 1.0);
  double chi = 0.0, chi_prev = -1.0, chi_prev2 = -1.0, residual = 1.0;
  int iters = 0;
  bool converged = false;
  for (; iters < max_iter; ++iters) {
    Observable psi = op.apply(phi, w);
    double sup = psi.max_value();
    if (!(sup > 0) || !std::isfinite(sup))
      throw NonpositiveEigenfunction("power iteration lost positivity");
    chi_prev2 = chi_prev;
    chi_prev = chi;
    chi = sup;
    // eigenvalue deltas alone can stall (for f = 0 the sup is exact from the
    // first step); require the eigenvector residual to settle as well
    residual = 0.0;
    for (int i = 0; i < grid.m; ++i)
      residual = std::max(residual, std::fabs(psi[i] - sup * phi[i]));
    for (double& v : psi.data()) v /= sup;
    phi = std::move(psi);
    if (iters >= 2 && std::fabs(chi - chi_prev) < tol && residual <= 10.0 * tol * chi) {
      converged = true;
      ++iters;
      break;
    }
  }
  if (!converged) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "eigenvalue iteration did not reach tol=%g in %d steps "
                  "(last delta %.3e, residual %.3e)",
                  tol, max_iter, std::fabs(chi - chi_prev), residual);
    throw NoConvergence(msg);
  }

  RPFData out{.chi = chi,
              .pressure = std::log(chi),
              .h = phi,
              .nu = {},
              .mu = {},
              .residual = 0.0,
              .chi_ulam = 0.0,
              .chi_aitken = chi_prev2 >= 0 ? aitken(chi_prev2, chi_prev, chi) : chi,
              .iterations = iters,
              .ulam_iterations = 0};

  {
    Observable lh = op.apply(out.h, w);
    double r = 0;
    for (int i = 0; i < grid.m; ++i) r = std::max(r, std::fabs(lh[i] - chi * out.h[i]));
    out.residual = r / chi;
  }
  if (out.h.min_value() <= 0) throw NonpositiveEigenfunction("eigenfunction not positive");

  // eigenmeasure from the adjoint Ulam iteration; for f = 0 the eigenvalue
  // estimate is exactly N from the first step (row sums), so stop on the
  // vector residual, not on eigenvalue deltas
  UlamMatrix A = ulam_matrix(map, f, grid);
  std::vector<double> nu(grid.m, 1.0 / grid.m);
  double lam = 0.0, lam_res = 1.0;
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> next = A.apply_transpose(nu);
    double s = 0;
    for (double v : next) s += v;
    lam = s;  // nu is kept L1-normalized
    lam_res = 0;
    for (int i = 0; i < grid.m; ++i) lam_res += std::fabs(next[i] - lam * nu[i]);
    for (double& v : next) v /= s;
    nu = std::move(next);
    out.ulam_iterations = it + 1;
    if (it >= 2 && lam_res <= std::max(tol, 1e-13) * lam) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "adjoint Ulam iteration did not converge (L1 residual %.3e)", lam_res);
    throw NoConvergence(msg);
  }
  out.chi_ulam = lam;
  out.nu = std::move(nu);

  // normalize: integral(h dnu) = 1, mu = h nu with total mass 1
  double s = 0;
  for (int i = 0; i < grid.m; ++i) s += out.h[i] * out.nu[i];
  if (!(s > 0)) throw NonpositiveEigenfunction("eigenfunction has zero nu-mass");
  for (double& v : out.h.data()) v /= s;
  out.mu.resize(grid.m);
  double ms = 0;
  for (int i = 0; i < grid.m; ++i) {
    out.mu[i] = out.h[i] * out.nu[i];
    ms += out.mu[i];
  }
  for (double& v : out.mu) v /= ms;
  return out;
}

NormalizedPotential normalize_potential(const CircleMap& map, const Potential& f,
                                        const RPFData& rpf) {
  if (rpf.h.min_value() <= 0)
    throw NonpositiveEigenfunction("normalization requires a positive eigenfunction");
  return NormalizedPotential{map, f, rpf.h, rpf.chi};
}

double check_normalization(const CircleMap& map, const NormalizedPotential& ftilde,
                           const Grid& grid) {
  TransferOperator op(map, grid);
  auto w = op.weights([&ftilde](double y) { return ftilde(y); });
  Observable one = Observable::constant(grid, 1.0);
  Observable lf = op.apply(one, w);
  double r = 0;
  for (int i = 0; i < grid.m; ++i) r = std::max(r, std::fabs(lf[i] - 1.0));
  return r;
}

ConeReport cone_membership(const Observable& h, double kappa_f, const Modulus& Omega,
                           double rho_1, int pair_budget, std::uint64_t seed) {
  Rng rng(seed);
  ConeReport rep;
  rep.pairs = pair_budget;
  for (int p = 0; p < pair_budget; ++p) {
    double x = rng.uniform();
    double d = rho_1 * std::max(rng.uniform(), 1e-12);
    double y = wrap_unit(rng.uniform() < 0.5 ? x + d : x - d);
    double dd = circle_dist(x, y);
    if (dd <= 0) continue;
    double viol = std::fabs(std::log(h(x)) - std::log(h(y))) - kappa_f * Omega(dd);
    if (viol > rep.worst_log_violation) {
      rep.worst_log_violation = viol;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  rep.worst_multiplicative = std::exp(std::max(0.0, rep.worst_log_violation));
  return rep;
}

OperatorBundle make_bundle(const CircleMap& map, const Potential& f, const Grid& grid,
                           double tol, int max_iter) {
  return assemble_bundle(map, f, grid, leading_eigendata(map, f, grid, tol, max_iter));
}

OperatorBundle assemble_bundle(const CircleMap& map, const Potential& f, const Grid& grid,
                               RPFData rpf) {
  TransferOperator op(map, grid);
  auto w_f = op.weights([&f](double y) { return f(y); });

  // weights of the normalized operator, with h at the image taken from the
  // exact node value (T(preimage of node i) is node i)
  const int m = grid.m;
  std::vector<double> w_tilde(w_f.size());
  for (int b = 0; b < map.branch_count; ++b)
    for (int i = 0; i < m; ++i) {
      std::size_t k = static_cast<std::size_t>(b) * m + i;
      w_tilde[k] = w_f[k] * rpf.h(op.preimage(b, i)) / (rpf.h[i] * rpf.chi);
    }

  std::vector<double> w_theta(w_f.size()), w_theta_tilde(w_f.size());
  for (int b = 0; b < map.branch_count; ++b)
    for (int i = 0; i < m; ++i) {
      std::size_t k = static_cast<std::size_t>(b) * m + i;
      double damp = 1.0 / (1.0 + map.profile(op.preimage(b, i)));
      w_theta[k] = w_f[k] * damp;
      w_theta_tilde[k] = w_tilde[k] * damp;
    }

  NormalizedPotential ftilde = normalize_potential(map, f, rpf);
  OperatorBundle b{map,
                   grid,
                   f,
                   std::move(rpf),
                   std::move(ftilde),
                   std::move(op),
                   std::move(w_f),
                   std::move(w_tilde),
                   std::move(w_theta),
                   std::move(w_theta_tilde),
                   0.0};
  Observable one = Observable::constant(grid, 1.0);
  Observable l1 = b.op.apply(one, b.w_tilde);
  for (int i = 0; i < m; ++i)
    b.normalization_residual = std::max(b.normalization_residual, std::fabs(l1[i] - 1.0));
  return b;
}

}  // namespace ispec
