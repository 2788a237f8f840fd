#include "ispec/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ispec/errors.hpp"
#include "ispec/fit.hpp"
#include "ispec/parallel.hpp"
#include "ispec/rng.hpp"

namespace ispec {
namespace {

double normal_cdf(double t, double sigma) {
  return 0.5 * std::erfc(-t / (sigma * std::sqrt(2.0)));
}

}  // namespace

EquilibriumOrbitSampler::EquilibriumOrbitSampler(const OperatorBundle& b)
    : m_(b.grid.m), branches_(b.map.branch_count) {
  if (branches_ > 16) throw ConfigError("orbit sampler supports at most 16 branches");
  // branch preimages and normalized weights at the cell edges; edge 0 and m
  // are the exact branch endpoints
  edge_pre_.resize(static_cast<std::size_t>(branches_) * (m_ + 1));
  edge_w_.resize(edge_pre_.size());
  for (int br = 0; br < branches_; ++br) {
    for (int i = 0; i <= m_; ++i) {
      double y = i == 0 ? b.map.endpoints[br]
                        : (i == m_ ? b.map.endpoints[br + 1]
                                   : inverse_branch(b.map, static_cast<double>(i) / m_, br));
      std::size_t k = static_cast<std::size_t>(br) * (m_ + 1) + i;
      edge_pre_[k] = y;
      edge_w_[k] = std::exp(b.ftilde(y));
    }
  }
}

double EquilibriumOrbitSampler::step(double x, Rng& rng) const {
  double p = x * m_;
  int cell = std::min(static_cast<int>(p), m_ - 1);
  double t = p - cell;
  double w[16];
  double total = 0;
  for (int br = 0; br < branches_; ++br) {
    std::size_t k = static_cast<std::size_t>(br) * (m_ + 1) + cell;
    w[br] = (1 - t) * edge_w_[k] + t * edge_w_[k + 1];
    total += w[br];
  }
  double u = rng.uniform() * total;
  int pick = 0;
  for (; pick + 1 < branches_; ++pick) {
    if (u < w[pick]) break;
    u -= w[pick];
  }
  std::size_t k = static_cast<std::size_t>(pick) * (m_ + 1) + cell;
  return (1 - t) * edge_pre_[k] + t * edge_pre_[k + 1];
}

double EquilibriumOrbitSampler::chain_average(const std::function<double(double)>& phi,
                                              double start, long steps, Rng& rng) const {
  double x = start, acc = 0;
  long burn = std::max<long>(steps / 100, 100);
  for (long i = 0; i < burn; ++i) x = step(x, rng);
  for (long i = 0; i < steps; ++i) {
    acc += phi(x);
    x = step(x, rng);
  }
  return acc / static_cast<double>(steps);
}

double EquilibriumOrbitSampler::chain_average(const Observable& phi, double start, long steps,
                                              Rng& rng) const {
  return chain_average([&phi](double x) { return phi(x); }, start, steps, rng);
}

double equilibrium_integral(const Observable& phi, std::span<const double> mu) {
  return integrate(phi, mu);
}

std::vector<double> correlation_series(const OperatorBundle& b, const Observable& phi,
                                       const Observable& psi, int n_max) {
  const double mean_phi = integrate(phi, b.rpf.mu);
  const double mean_psi = integrate(psi, b.rpf.mu);
  std::vector<double> corr(n_max + 1);
  Observable cur = phi;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) cur = b.op.apply(cur, b.w_tilde);
    double s = 0;
    for (int i = 0; i < b.grid.m; ++i) s += psi[i] * cur[i] * b.rpf.mu[i];
    corr[n] = s - mean_phi * mean_psi;
  }
  return corr;
}

double correlation_direct(const OperatorBundle& b, const Observable& phi,
                          const Observable& psi, int n) {
  double s = 0;
  for (int i = 0; i < b.grid.m; ++i) {
    double x = b.grid.node(i);
    for (int t = 0; t < n; ++t) x = b.map.eval(x);
    s += phi[i] * psi(x) * b.rpf.mu[i];
  }
  return s;
}

DecayReport decay_fit(const std::vector<double>& corr, double noise_floor) {
  DecayReport rep;
  if (corr.size() < 2) throw InsufficientSignal("correlation series too short");
  rep.noise_floor = noise_floor > 0 ? noise_floor : plateau_floor(corr);
  rep.floor_n = static_cast<int>(corr.size());
  for (std::size_t n = 1; n < corr.size(); ++n) {
    if (std::fabs(corr[n]) <= rep.noise_floor) {
      rep.floor_n = static_cast<int>(n);
      break;
    }
  }
  std::vector<double> xs, ys;
  for (int n = 1; n < rep.floor_n; ++n) {
    double a = std::fabs(corr[n]);
    if (a > rep.noise_floor) {
      xs.push_back(n);
      ys.push_back(std::log(a));
    }
  }
  rep.fit_points = static_cast<int>(xs.size());
  if (rep.fit_points < 5)
    throw InsufficientSignal("fewer than 5 correlation points above the noise floor");
  LinearFit fit = least_squares(xs, ys);
  rep.K = std::exp(fit.intercept);
  rep.rho = std::exp(fit.slope);
  rep.r2 = fit.r2;
  rep.pass = rep.rho <= 1.0 - 1e-3 && rep.r2 >= 0.9;
  return rep;
}

std::vector<double> sample_equilibrium(const Grid& grid, std::span<const double> mu,
                                       int count, std::uint64_t seed) {
  std::vector<double> cdf(mu.size());
  double acc = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += mu[i];
    cdf[i] = acc;
  }
  Rng rng(seed);
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int j = std::min<int>(static_cast<int>(it - cdf.begin()), grid.m - 1);
    double lo = j > 0 ? cdf[j - 1] : 0.0;
    double t = mu[j] > 0 ? (u - lo) / mu[j] : 0.5;
    out[k] = (j + std::clamp(t, 0.0, 1.0 - 1e-12)) * grid.width();
  }
  return out;
}

CLTReport clt_test(const OperatorBundle& b, const Observable& phi, int n_orbit, int n_samples,
                   std::uint64_t seed) {
  CLTReport rep;
  rep.n_orbit = n_orbit;
  rep.n_samples = n_samples;

  const double mean = equilibrium_integral(phi, b.rpf.mu);

  // Green-Kubo variance from the autocorrelation series, truncated at noise
  auto corr = correlation_series(b, phi, phi, 200);
  double floor = plateau_floor(corr);
  double gk = corr[0];
  for (std::size_t n = 1; n < corr.size(); ++n) {
    if (std::fabs(corr[n]) <= floor) break;
    gk += 2.0 * corr[n];
  }
  if (gk < 1e-10)
    throw DegenerateVariance("Green-Kubo variance below 1e-10 (cohomologous to a constant?)");
  rep.gamma_gk = std::sqrt(gk);

  EquilibriumOrbitSampler sampler(b);
  auto starts = sample_equilibrium(b.grid, b.rpf.mu, n_samples, substream(seed, 1));
  rep.sums.assign(n_samples, 0.0);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n_orbit));
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t k) {
    Rng rng(substream(seed, 1000 + k));
    double x = starts[k];
    double s = 0;
    for (int t = 0; t < n_orbit; ++t) {
      s += phi(x) - mean;
      x = sampler.step(x, rng);
    }
    rep.sums[k] = s * inv_sqrt;
  });

  double m1 = 0, m2 = 0;
  for (double s : rep.sums) {
    m1 += s;
    m2 += s * s;
  }
  m1 /= n_samples;
  m2 /= n_samples;
  rep.gamma_fit = std::sqrt(std::max(0.0, m2 - m1 * m1));

  std::vector<double> sorted = rep.sums;
  std::sort(sorted.begin(), sorted.end());
  double d = 0;
  for (int i = 0; i < n_samples; ++i) {
    double F = normal_cdf(sorted[i], rep.gamma_gk);
    d = std::max(d, std::fabs(F - static_cast<double>(i) / n_samples));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n_samples - F));
  }
  rep.ks = d;
  rep.pass = rep.ks < 0.05;
  return rep;
}

MixingTable mixing_check(const OperatorBundle& b, const Observable& phi, const Observable& psi,
                         int n_max) {
  MixingTable table;
  auto corr = correlation_series(b, psi, phi, n_max);  // integral(phi.T^n psi dmu) centered
  table.centered.resize(corr.size());
  for (std::size_t n = 0; n < corr.size(); ++n) table.centered[n] = std::fabs(corr[n]);
  table.threshold = 10.0 * plateau_floor(corr);
  for (int n = n_max / 2; n <= n_max; ++n)
    table.tail_max = std::max(table.tail_max, table.centered[n]);
  table.converged = table.tail_max <= table.threshold;
  return table;
}

}  // namespace ispec
