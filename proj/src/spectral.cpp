#include "ispec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ispec/errors.hpp"
#include "ispec/fit.hpp"
#include "ispec/rng.hpp"

namespace ispec {

std::vector<double> theta_series(const OperatorBundle& b, int n_max) {
  std::vector<double> theta(n_max + 1);
  theta[0] = 1.0;
  Observable u = Observable::constant(b.grid, 1.0);
  double log_scale = 0.0;  // per-step renormalization against chi^{-n} underflow
  double log_chi = std::log(b.rpf.chi);
  for (int n = 1; n <= n_max; ++n) {
    u = b.op.apply(u, b.w_theta);
    double sup = u.max_value();
    log_scale += std::log(sup);
    for (double& v : u.data()) v /= sup;
    theta[n] = std::exp(log_scale - n * log_chi);
  }
  return theta;
}

double tau_from_theta(const Modulus& Omega, double theta_n, int grid_points, double d_min) {
  if (theta_n < 0 || theta_n > 1.0 + 1e-12)
    throw PreconditionViolated("tau requires theta in [0, 1]");
  if (theta_n == 0) return 0.0;
  if (theta_n >= 1.0) return 1.0;
  return orderly_profile(Omega, theta_n, grid_points, d_min);
}

ThetaLimitTable theta_limit_check(const OperatorBundle& b, int n_max) {
  ThetaLimitTable table;
  Observable g = Observable::constant(b.grid, 1.0);
  table.sup_norms.push_back(1.0);
  for (int n = 1; n <= n_max; ++n) {
    Observable next = b.op.apply(g, b.w_theta_tilde);
    for (int i = 0; i < b.grid.m; ++i) {
      if (!(next[i] < g[i]) && table.strictly_decreasing) {
        table.strictly_decreasing = false;
        table.first_violation_n = n;
      }
    }
    table.sup_norms.push_back(next.max_value());
    g = std::move(next);
  }
  return table;
}

std::vector<TestObservable> observable_battery(const Grid& grid, const Modulus& Omega,
                                               std::uint64_t seed) {
  std::vector<TestObservable> out;
  auto pairs = SeminormPairs::build(grid.m, Omega, 4000, substream(seed, 77));
  auto push = [&](const std::string& name, Observable phi) {
    TestObservable t{name, std::move(phi), 0.0, 0.0};
    t.sup = t.phi.sup_norm();
    t.seminorm = pairs.estimate(t.phi.samples());
    out.push_back(std::move(t));
  };
  const double tau = 2.0 * std::numbers::pi;
  for (int k = 1; k <= 4; ++k) {
    push("cos" + std::to_string(k),
         Observable::from_function(grid, [k, tau](double x) { return std::cos(tau * k * x); }));
    push("sin" + std::to_string(k),
         Observable::from_function(grid, [k, tau](double x) { return std::sin(tau * k * x); }));
  }
  for (double c : {0.15, 0.5, 0.85}) {
    char name[32];
    std::snprintf(name, sizeof name, "cone%.2f", c);
    push(name, Observable::from_function(
                   grid, [c, &Omega](double x) { return Omega(circle_dist(x, c)); }));
  }
  // seeded random field with a power-law spectrum: rough at every scale yet
  // with finite Omega-seminorm, and decaying geometrically under full-branch
  // maps (an exponentially decaying spectrum would collapse supergeometrically
  // and carry no rate)
  Rng rng(substream(seed, 78));
  std::vector<double> raw(grid.m, 0.0);
  int kmax = std::min(grid.m / 4, 512);
  for (int k = 1; k <= kmax; ++k) {
    double amp = std::pow(1.0 + k, -1.6);
    double a = amp * rng.uniform(-1.0, 1.0), bco = amp * rng.uniform(-1.0, 1.0);
    for (int i = 0; i < grid.m; ++i) {
      double ang = tau * k * grid.node(i);
      raw[i] += a * std::cos(ang) + bco * std::sin(ang);
    }
  }
  push("random", Observable(grid, std::move(raw)));
  return out;
}

DFLYReport dfly_check(const OperatorBundle& b, const Modulus& Omega, double kappa_f,
                      double rho_1, const DFLYOptions& opt) {
  DFLYReport rep;
  rep.kappa_f = kappa_f;
  rep.n_values = opt.n_list;
  int n_top = *std::max_element(opt.n_list.begin(), opt.n_list.end());
  auto theta = theta_series(b, n_top);
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta[i] > theta[i - 1] + 1e-12) rep.theta_nonincreasing = false;
  for (int n : opt.n_list) {
    rep.theta.push_back(theta[n]);
    rep.tau.push_back(tau_from_theta(Omega, std::min(theta[n], 1.0)));
  }

  rep.h_ratio = b.rpf.h.max_value() / b.rpf.h.min_value();
  rep.gamma_paper = std::max(2.0 * kappa_f * std::exp(2.0 * kappa_f * Omega(0.5)),
                             std::ceil(rep.h_ratio));

  // sampled pairs: log-spaced distances cover the near-diagonal, uniform ones
  // the bulk; both sides of the wraparound occur through the uniform base
  Rng rng(opt.seed);
  std::vector<double> px(opt.pair_budget), py(opt.pair_budget), pd(opt.pair_budget),
      omega_d(opt.pair_budget);
  for (int p = 0; p < opt.pair_budget; ++p) {
    double x = rng.uniform();
    double d = (p % 2 == 0) ? rho_1 * std::max(1e-12, rng.uniform())
                            : rho_1 * std::pow(10.0, -6.0 * rng.uniform());
    double y = wrap_unit(rng.uniform() < 0.5 ? x + d : x - d);
    px[p] = x;
    py[p] = y;
    pd[p] = circle_dist(x, y);
    omega_d[p] = Omega(pd[p]);
  }

  auto battery = observable_battery(b.grid, Omega, substream(opt.seed, 3));
  std::vector<Observable> iterates;
  iterates.reserve(battery.size());
  for (auto& t : battery) iterates.push_back(t.phi);

  int n_cur = 0;
  for (int n : opt.n_list) {
    for (; n_cur < n; ++n_cur)
      for (auto& it : iterates) it = b.op.apply(it, b.w_tilde);
    double th = theta[n];
    for (std::size_t o = 0; o < battery.size(); ++o) {
      const Observable& phin = iterates[o];
      for (int p = 0; p < opt.pair_budget; ++p) {
        if (pd[p] <= 0) continue;
        double lhs = std::fabs(phin(px[p]) - phin(py[p]));
        double rhs = battery[o].seminorm * Omega(std::min(th * pd[p], 0.5)) +
                     battery[o].sup * omega_d[p];
        if (rhs > 0) rep.gamma_empirical = std::max(rep.gamma_empirical, lhs / rhs);
        if (lhs > rep.gamma_paper * rhs + opt.slack_tol) ++rep.violations;
        ++rep.pairs_tested;
      }
    }
  }
  return rep;
}

GapEstimate gap_estimate(const OperatorBundle& b, const Modulus& Omega, const GapOptions& opt) {
  GapEstimate est;
  auto pairs = SeminormPairs::build(b.grid.m, Omega, opt.seminorm_budget, substream(opt.seed, 5));
  auto battery = observable_battery(b.grid, Omega, substream(opt.seed, 6));

  for (auto& t : battery) {
    GapTrack track;
    track.name = t.name;
    Observable phi = t.phi;
    double mean = 0;
    for (int i = 0; i < b.grid.m; ++i) mean += phi[i] * b.rpf.mu[i];
    for (double& v : phi.data()) v -= mean;
    double norm0 = phi.sup_norm() + pairs.estimate(phi.samples());
    if (norm0 <= opt.noise_floor) {
      // centered away entirely (constants)
      track.annihilated = true;
      track.contracted_two_thirds = true;
      track.norms.assign(opt.n_max + 1, 0.0);
      est.tracks.push_back(std::move(track));
      continue;
    }
    for (double& v : phi.data()) v /= norm0;
    track.norms.push_back(1.0);
    double sem0 = pairs.estimate(phi.samples());
    for (int n = 1; n <= opt.n_max; ++n) {
      phi = b.op.apply(phi, b.w_tilde);
      double sem = pairs.estimate(phi.samples());
      if (sem > 10.0 * std::max(1.0, sem0)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "Omega-seminorm of iterate '%s' grew to %.3e at n=%d "
                      "(modulus likely not orderly-vanishing or compatibility fails)",
                      t.name.c_str(), sem, n);
        throw SeminormBlowup(msg);
      }
      double norm = phi.sup_norm() + sem;
      track.norms.push_back(norm);
      if (norm <= 2.0 / 3.0) track.contracted_two_thirds = true;
    }

    // grid iterates bottom out at a per-track interpolation-noise plateau;
    // fit the geometric stretch between the transient and that plateau
    double floor = std::max(opt.noise_floor, plateau_floor(track.norms));
    std::vector<double> xs, ys;
    int lo = std::max(1, static_cast<int>(std::ceil(0.2 * opt.n_max)));
    for (int pass = 0; pass < 2 && xs.size() < 5; ++pass) {
      xs.clear();
      ys.clear();
      for (int n = pass == 0 ? lo : 1; n <= opt.n_max; ++n) {
        if (track.norms[n] > floor) {
          xs.push_back(n);
          ys.push_back(std::log(track.norms[n]));
        }
      }
    }
    track.fit_points = static_cast<int>(xs.size());
    if (track.fit_points >= 5) {
      LinearFit fit = least_squares(xs, ys);
      track.rho = std::exp(fit.slope);
      track.r2 = fit.r2;
    } else {
      // collapsed to the floor too fast to carry a rate; excluded from the
      // aggregate
      track.annihilated = true;
      track.rho = 0.0;
      track.r2 = 1.0;
    }
    est.tracks.push_back(std::move(track));
  }

  // the slowest track determines the estimate; its fit quality qualifies it
  for (auto& t : est.tracks) {
    if (t.annihilated) continue;
    if (t.rho > est.rho_hat) {
      est.rho_hat = t.rho;
      est.r2 = t.r2;
    }
  }
  est.pass = est.rho_hat <= 1.0 - 1e-3 && est.r2 >= 0.9;
  return est;
}

}  // namespace ispec
