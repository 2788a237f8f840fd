#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ispec/certificate.hpp"
#include "ispec/errors.hpp"
#include "ispec/map.hpp"
#include "ispec/modulus.hpp"
#include "ispec/spectral.hpp"
#include "ispec/transfer.hpp"

using namespace ispec;

namespace {

OperatorBundle doubling_bundle(int m = 1024) {
  return make_bundle(build_map(VelocityProfile::flat_oracle(1)), Potential::zero(), Grid(m));
}

OperatorBundle mp_bundle(int m = 2048) {
  CircleMap mh = build_map(VelocityProfile::manneville_pomeau(0.5));
  return make_bundle(mh, Potential::modulus_cone(0.37, 0.1, Modulus::power(0.8)), Grid(m));
}

}  // namespace

TEST_CASE("theta sequence") {
  // doubling, f = 0: L_{-log 2}^n 1 = 1, so theta(n) = 2^{-n} exactly
  OperatorBundle bd = doubling_bundle();
  auto thd = theta_series(bd, 20);
  CHECK(thd[0] == 1.0);
  for (int n = 1; n <= 20; ++n)
    CHECK(thd[n] == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-12));

  // M_1, f = 0: theta(1) = (1 + golden)/2 (sup attained at the fixed point;
  // the grid sup sits half a cell away)
  CircleMap m1 = build_map(VelocityProfile::manneville_pomeau(1.0));
  OperatorBundle b1 = make_bundle(m1, Potential::zero(), Grid(4096));
  auto th1 = theta_series(b1, 20);
  double golden = (std::sqrt(5.0) - 1) / 2;
  CHECK(th1[1] == doctest::Approx((1 + golden) / 2).epsilon(5e-4));
  CHECK(th1[20] < th1[5]);
  for (int n = 1; n <= 20; ++n) CHECK(th1[n] < th1[n - 1]);
}

TEST_CASE("tau from theta") {
  // homogeneity: Power(tau) turns the grid supremum into theta^tau
  for (double tau : {0.3, 0.5, 1.0})
    for (double th : {0.9, 0.5, 0.01})
      CHECK(tau_from_theta(Modulus::power(tau), th) ==
            doctest::Approx(std::pow(th, tau)).epsilon(1e-12));

  CHECK(tau_from_theta(Modulus::power(0.3), 1.0) == 1.0);
  CHECK(tau_from_theta(Modulus::power(0.3), 0.0) == 0.0);
  CHECK_THROWS_AS(tau_from_theta(Modulus::power(0.3), 1.5), PreconditionViolated);

  // the scaled slowly-varying modulus contracts below 1
  Modulus om_s = Modulus::log_power(0.0, {{2, 1.0}}).power_scaled(0.5);
  double t = tau_from_theta(om_s, 0.5);
  CHECK(t < 1.0);
  CHECK(t > 0.5);  // x^0.5 part gives 0.707, loglog part pushes up toward 1

  // monotone link: tau non-increasing along a non-increasing theta sequence
  OperatorBundle bm = mp_bundle();
  auto th = theta_series(bm, 12);
  double prev = 2.0;
  for (int n = 0; n <= 12; ++n) {
    double tn = tau_from_theta(Modulus::power(0.3), std::min(th[n], 1.0));
    CHECK(tn <= prev + 1e-12);
    prev = tn;
  }
}

TEST_CASE("pointwise decay of the damped normalized operator") {
  // doubling: each step multiplies by exactly 1/2
  OperatorBundle bd = doubling_bundle();
  ThetaLimitTable td = theta_limit_check(bd, 10);
  CHECK(td.strictly_decreasing);
  CHECK(td.sup_norms[10] == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));

  // M_1, f = 0: strict decrease at all 4096 nodes for n <= 30
  CircleMap m1 = build_map(VelocityProfile::manneville_pomeau(1.0));
  OperatorBundle b1 = make_bundle(m1, Potential::zero(), Grid(4096));
  ThetaLimitTable t1 = theta_limit_check(b1, 30);
  CHECK(t1.strictly_decreasing);
  CHECK(t1.first_violation_n == -1);
  CHECK(t1.sup_norms[0] == 1.0);
  CHECK(t1.sup_norms[30] < 0.01);
}

TEST_CASE("constants are fixed by the normalized operator") {
  OperatorBundle bm = mp_bundle(1024);
  Observable c = Observable::constant(bm.grid, 0.7);
  SeminormPairs pairs = SeminormPairs::build(bm.grid.m, Modulus::power(0.3), 2000, 5);
  for (int n = 0; n < 10; ++n) {
    CHECK(pairs.estimate(c.samples()) <= 1e-9);  // |L^n 1|_Omega stays 0
    double lo = c.min_value(), hi = c.max_value();
    CHECK(hi - lo <= 1e-12);
    c = bm.op.apply(c, bm.w_tilde);
  }
}

TEST_CASE("dfly inequality on the doubling oracle") {
  // f = 0: kappa = 0 and max h / min h = 1, so the paper constant is 1
  OperatorBundle bd = doubling_bundle(2048);
  DFLYOptions opt;
  opt.n_list = {1, 2, 3};
  opt.pair_budget = 4000;
  opt.seed = 17;
  DFLYReport rep = dfly_check(bd, Modulus::power(0.5), 0.0, 0.5 * bd.map.rho_v, opt);
  CHECK(rep.gamma_paper == doctest::Approx(1.0));
  CHECK(rep.violations == 0);
  CHECK(rep.gamma_empirical <= rep.gamma_paper + 1e-9);
  CHECK(rep.theta_nonincreasing);
}

TEST_CASE("dfly inequality on the admissible intermittent setup") {
  CircleMap mh = build_map(VelocityProfile::manneville_pomeau(0.5));
  Modulus om = Modulus::power(0.8), Om = Modulus::power(0.3);
  OperatorBundle bm = make_bundle(mh, Potential::modulus_cone(0.37, 0.1, om), Grid(2048));

  CertificateOptions copt;
  copt.seed = 42;
  auto cert = compatibility_certificate(mh, om, Om, copt);
  double kappa = 0.1 / cert.c1;

  DFLYOptions opt;
  opt.n_list = {1, 2, 4, 8};
  opt.pair_budget = 4000;
  opt.seed = 18;
  DFLYReport rep = dfly_check(bm, Om, kappa, cert.rho_1, opt);
  CHECK(rep.violations == 0);
  CHECK(rep.gamma_paper >= 1.0);
  CHECK(rep.gamma_empirical < rep.gamma_paper);
  CHECK(rep.theta_nonincreasing);
  // tau values live in [0, 1] for theta <= 1
  for (double t : rep.tau) {
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("gap estimate on the doubling oracle") {
  OperatorBundle bd = doubling_bundle(4096);
  GapOptions opt;
  opt.seed = 4242;
  GapEstimate est = gap_estimate(bd, Modulus::power(0.5), opt);
  CHECK(est.pass);
  CHECK(est.r2 >= 0.9);
  // cone observables populate Fourier modes like k^{-3/2}, so the surviving
  // mass after n doublings scales by 2^{-3/2} = 0.354 per step; that rate
  // dominates the battery
  CHECK(est.rho_hat > 0.25);
  CHECK(est.rho_hat < 0.45);

  for (auto& t : est.tracks) {
    CHECK(t.contracted_two_thirds);
    // low Fourier modes are annihilated outright (odd modes die, k halves)
    if (t.name == "cos1" || t.name == "sin1" || t.name == "cos3" || t.name == "sin3") {
      CHECK(t.annihilated);
      CHECK(t.norms[3] <= 1e-10);
    }
  }
}

TEST_CASE("gap estimate on the admissible intermittent setup") {
  OperatorBundle bm = mp_bundle(4096);
  GapOptions opt;
  opt.seed = 4242;
  GapEstimate est = gap_estimate(bm, Modulus::power(0.3), opt);
  CHECK(est.pass);
  CHECK(est.rho_hat < 1.0 - 1e-3);
  CHECK(est.r2 >= 0.9);
  for (auto& t : est.tracks) CHECK(t.contracted_two_thirds);
}

TEST_CASE("battery observables carry their norms") {
  Grid g(1024);
  auto battery = observable_battery(g, Modulus::power(0.5), 9);
  REQUIRE(battery.size() == 12);
  for (auto& t : battery) {
    CHECK(t.sup > 0);
    CHECK(t.seminorm > 0);
    CHECK(std::isfinite(t.seminorm));
  }
  // cosine sup sits half a cell off 1 on the midpoint grid
  CHECK(battery[0].name == "cos1");
  CHECK(battery[0].sup == doctest::Approx(1.0).epsilon(1e-5));
}
