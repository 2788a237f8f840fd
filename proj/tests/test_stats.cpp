#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ispec/errors.hpp"
#include "ispec/map.hpp"
#include "ispec/modulus.hpp"
#include "ispec/rng.hpp"
#include "ispec/stats.hpp"
#include "ispec/transfer.hpp"

using namespace ispec;

namespace {

const double kTau = 2.0 * std::numbers::pi;

OperatorBundle doubling_bundle(int m = 1024) {
  return make_bundle(build_map(VelocityProfile::flat_oracle(1)), Potential::zero(), Grid(m));
}

OperatorBundle mp_bundle(int m = 2048) {
  CircleMap mh = build_map(VelocityProfile::manneville_pomeau(0.5));
  return make_bundle(mh, Potential::modulus_cone(0.37, 0.1, Modulus::power(0.8)), Grid(m));
}

Observable cos_obs(const Grid& g, int k = 1) {
  return Observable::from_function(g, [k](double x) { return std::cos(kTau * k * x); });
}

}  // namespace

TEST_CASE("equilibrium integrals") {
  OperatorBundle bd = doubling_bundle();
  CHECK(equilibrium_integral(Observable::constant(bd.grid, 1.0), bd.rpf.mu) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(equilibrium_integral(cos_obs(bd.grid), bd.rpf.mu)) <= 1e-10);
}

TEST_CASE("equilibrium integral matches the stationary-orbit average") {
  // mu-stationary chain as the ergodic oracle (forward orbits of typical
  // points equidistribute to the physical measure instead)
  CircleMap m1 = build_map(VelocityProfile::manneville_pomeau(1.0));
  OperatorBundle b = make_bundle(m1, Potential::zero(), Grid(4096));
  Observable id = Observable::from_function(b.grid, [](double x) { return x; });
  double quad = equilibrium_integral(id, b.rpf.mu);

  EquilibriumOrbitSampler sampler(b);
  Rng rng(2024);
  double avg = sampler.chain_average([](double x) { return x; }, 0.7, 10000000, rng);
  CHECK(std::fabs(avg - quad) <= 2e-3);
}

TEST_CASE("correlations of constants vanish") {
  OperatorBundle bm = mp_bundle(1024);
  Observable one = Observable::constant(bm.grid, 1.0);
  Observable psi = cos_obs(bm.grid);
  auto corr = correlation_series(bm, one, psi, 10);
  for (double c : corr) CHECK(std::fabs(c) <= 1e-10);
}

TEST_CASE("doubling Fourier pair: C(0) = 1/2 and no memory") {
  OperatorBundle bd = doubling_bundle(2048);
  Observable phi = cos_obs(bd.grid);
  auto corr = correlation_series(bd, phi, phi, 12);
  CHECK(corr[0] == doctest::Approx(0.5).epsilon(1e-10));
  for (int n = 1; n <= 12; ++n) CHECK(std::fabs(corr[n]) <= 1e-10);
}

TEST_CASE("C(0) is the variance") {
  OperatorBundle bm = mp_bundle(1024);
  Observable phi = cos_obs(bm.grid);
  auto corr = correlation_series(bm, phi, phi, 3);
  double m1 = equilibrium_integral(phi, bm.rpf.mu);
  double m2 = 0;
  for (int i = 0; i < bm.grid.m; ++i) m2 += phi[i] * phi[i] * bm.rpf.mu[i];
  CHECK(corr[0] == doctest::Approx(m2 - m1 * m1).epsilon(1e-12));
  CHECK(corr[0] >= 0);
}

TEST_CASE("operator route agrees with forward-orbit quadrature") {
  // direct route composes T on the nodes: independent of inverse branches,
  // accurate until the derivative growth outruns the cell size
  OperatorBundle bd = doubling_bundle(4096);
  OperatorBundle bm = mp_bundle(4096);
  for (OperatorBundle* pb : {&bd, &bm}) {
    OperatorBundle& b = *pb;
    Observable phi = cos_obs(b.grid);
    Observable psi = Observable::from_function(
        b.grid, [](double x) { return std::sin(kTau * x) + 0.3; });
    double mphi = equilibrium_integral(phi, b.rpf.mu);
    double mpsi = equilibrium_integral(psi, b.rpf.mu);
    auto corr = correlation_series(b, psi, phi, 10);
    for (int n : {1, 2, 4, 6, 8}) {
      double direct = correlation_direct(b, psi, phi, n) - mphi * mpsi;
      CHECK(std::fabs(corr[n] - direct) <= 1e-3);
    }
    double d10 = correlation_direct(b, psi, phi, 10) - mphi * mpsi;
    CHECK(std::fabs(corr[10] - d10) <= 5e-2);
  }
}

TEST_CASE("decay fit on synthetic series") {
  // exact geometric data
  std::vector<double> geo(41);
  for (int n = 0; n <= 40; ++n) geo[n] = 0.3 * std::pow(0.5, n);
  DecayReport rep = decay_fit(geo, 1e-30);
  CHECK(rep.K == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(rep.rho == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.r2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.pass);

  // alternating sign: the fit runs on |C|
  std::vector<double> alt(31);
  for (int n = 0; n <= 30; ++n) alt[n] = 0.3 * std::pow(-0.6, n);
  DecayReport ra = decay_fit(alt, 1e-30);
  CHECK(ra.rho == doctest::Approx(0.6).epsilon(1e-10));

  // 1/n is not exponential: R^2 stays under 0.9 on 30 and on 100 points
  for (int N : {30, 100}) {
    std::vector<double> harm(N + 1);
    for (int n = 0; n <= N; ++n) harm[n] = n == 0 ? 1.0 : 1.0 / n;
    DecayReport rh = decay_fit(harm, 1e-9);
    CHECK_FALSE(rh.pass);
    CHECK(rh.r2 < 0.9);
  }

  // too little signal
  std::vector<double> flat(30, 1e-14);
  flat[0] = 1.0;
  CHECK_THROWS_AS(decay_fit(flat, 1e-9), InsufficientSignal);
}

TEST_CASE("decay fit is self-consistent on the intermittent family") {
  OperatorBundle bm = mp_bundle(2048);
  Observable phi = cos_obs(bm.grid);
  auto corr = correlation_series(bm, phi, phi, 60);
  DecayReport rep = decay_fit(corr);
  CHECK(rep.pass);
  CHECK(rep.rho > 0.2);
  CHECK(rep.rho < 0.7);
  // exponential envelope at the fitted rate (with margin) dominates the
  // series; least squares balances through the window, so anchor at C(1)
  for (int n = 1; n < rep.floor_n; ++n)
    CHECK(std::fabs(corr[n]) <=
          std::fabs(corr[1]) * std::pow(rep.rho + 0.15, n - 1) + 3.0 * rep.noise_floor);
}

TEST_CASE("equilibrium sampling") {
  Grid g(256);
  // uniform weights: the empirical CDF stays within 0.01 of the identity
  std::vector<double> uni(g.m, 1.0 / g.m);
  auto pts = sample_equilibrium(g, uni, 100000, 9);
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double F = sorted[i];
    ks = std::max(ks, std::fabs(F - static_cast<double>(i) / sorted.size()));
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / sorted.size() - F));
  }
  CHECK(ks < 0.01);

  // a point mass lands every sample in its cell
  std::vector<double> atom(g.m, 0.0);
  atom[37] = 1.0;
  for (double x : sample_equilibrium(g, atom, 500, 9)) {
    CHECK(x >= g.cell_left(37));
    CHECK(x < g.cell_left(37) + g.width());
  }

  // equilibrium sampling reproduces the quadrature mean within 3 sigma
  OperatorBundle b1 = make_bundle(build_map(VelocityProfile::manneville_pomeau(1.0)),
                                  Potential::zero(), Grid(1024));
  Observable id = Observable::from_function(b1.grid, [](double x) { return x; });
  double mean = equilibrium_integral(id, b1.rpf.mu);
  auto draws = sample_equilibrium(b1.grid, b1.rpf.mu, 100000, 13);
  double m = 0, v = 0;
  for (double x : draws) m += x;
  m /= draws.size();
  for (double x : draws) v += (x - m) * (x - m);
  v /= draws.size();
  CHECK(std::fabs(m - mean) <= 3.0 * std::sqrt(v / draws.size()));
}

TEST_CASE("seed determinism") {
  Grid g(64);
  std::vector<double> uni(g.m, 1.0 / g.m);
  auto a = sample_equilibrium(g, uni, 1000, 77);
  auto b = sample_equilibrium(g, uni, 1000, 77);
  CHECK(a == b);

  OperatorBundle bd = doubling_bundle(256);
  auto r1 = clt_test(bd, cos_obs(bd.grid), 1000, 10000, 123);
  auto r2 = clt_test(bd, cos_obs(bd.grid), 1000, 10000, 123);
  CHECK(r1.sums == r2.sums);
  CHECK(r1.ks == r2.ks);
}

TEST_CASE("clt on the doubling oracle") {
  OperatorBundle bd = doubling_bundle(4096);
  CLTReport rep = clt_test(bd, cos_obs(bd.grid), 1000, 20000, 31337);
  // gamma^2 = C(0) = 1/2: all higher autocorrelations vanish
  CHECK(rep.gamma_gk * rep.gamma_gk == doctest::Approx(0.5).epsilon(2e-6));
  CHECK(rep.ks < 0.05);
  CHECK(rep.pass);
  CHECK(rep.gamma_gk / rep.gamma_fit == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("clt on the admissible intermittent setup") {
  OperatorBundle bm = mp_bundle(2048);
  CLTReport rep = clt_test(bm, cos_obs(bm.grid), 1000, 20000, 31337);
  CHECK(rep.ks < 0.05);
  CHECK(rep.pass);
  double ratio = rep.gamma_gk / rep.gamma_fit;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("constants trigger the degenerate-variance guard") {
  OperatorBundle bd = doubling_bundle(256);
  Observable c = Observable::constant(bd.grid, 0.42);
  CHECK_THROWS_AS(clt_test(bd, c, 1000, 10000, 5), DegenerateVariance);
  // and their seminorm is exactly zero
  CHECK(seminorm_estimate(c.samples(), Modulus::power(0.5), 1000, 5) == 0.0);
}

TEST_CASE("mixing tables") {
  OperatorBundle bd = doubling_bundle(1024);
  Observable one = Observable::constant(bd.grid, 1.0);
  Observable phi = cos_obs(bd.grid);
  MixingTable m0 = mixing_check(bd, one, phi, 20);
  CHECK(m0.converged);
  CHECK(m0.tail_max <= 1e-10);

  MixingTable m1 = mixing_check(bd, phi, phi, 20);
  CHECK(m1.converged);
  CHECK(m1.tail_max <= 1e-10);  // Fourier pair is done after one step

  CircleMap mm = build_map(VelocityProfile::manneville_pomeau(1.0));
  OperatorBundle b1 = make_bundle(mm, Potential::zero(), Grid(4096));
  Observable id = Observable::from_function(b1.grid, [](double x) { return x; });
  MixingTable mx = mixing_check(b1, id, id, 60);
  CHECK(mx.converged);
  CHECK(mx.tail_max < 0.05);             // identity has a circle jump: slow but real decay
  CHECK(mx.tail_max < 0.5 * mx.centered[1]);
}

TEST_CASE("green-kubo consistency on the doubling oracle") {
  OperatorBundle bd = doubling_bundle(2048);
  Observable phi = cos_obs(bd.grid);
  auto corr = correlation_series(bd, phi, phi, 50);
  CLTReport rep = clt_test(bd, phi, 1000, 10000, 7);
  CHECK(rep.gamma_gk * rep.gamma_gk == doctest::Approx(corr[0]).epsilon(1e-6));
}
