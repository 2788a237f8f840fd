#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ispec/errors.hpp"
#include "ispec/map.hpp"
#include "ispec/rng.hpp"

using namespace ispec;

namespace {

// quadratic-formula oracles for M_1 (solve y(1+y) = t)
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;          // y(1+y) = 1
const double kInvHalfB0 = (std::sqrt(3.0) - 1.0) / 2.0;       // y(1+y) = 0.5
const double kInvHalfB1 = (std::sqrt(7.0) - 1.0) / 2.0;       // y(1+y) = 1.5

CircleMap mp_map(double q) { return build_map(VelocityProfile::manneville_pomeau(q)); }
CircleMap doubling_map() { return build_map(VelocityProfile::flat_oracle(1)); }

// independent bisection oracle for g(r) = r (1 + r^q) - t on [0, 1]
double mp_preimage_oracle(double q, double t) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mid * (1.0 + std::pow(mid, q)) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("circle metric") {
  CHECK(circle_dist(0.1, 0.9) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(circle_dist(0.25, 0.25) == 0.0);
  CHECK(circle_dist(0.0, 0.5) == 0.5);
  // symmetry and the 1/2 cap on random pairs
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    double x = rng.uniform(), y = rng.uniform();
    CHECK(circle_dist(x, y) == circle_dist(y, x));
    CHECK(circle_dist(x, y) <= 0.5);
  }
}

TEST_CASE("eval_map on M_1") {
  CircleMap m = mp_map(1.0);
  CHECK(m.eval(0.0) == 0.0);  // indifferent fixed point
  CHECK(circle_dist(m.eval(kGolden), 0.0) <= 1e-15);
  CHECK(m.eval(0.5) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("branch endpoints") {
  CircleMap m1 = mp_map(1.0);
  REQUIRE(m1.branch_count == 2);
  REQUIRE(m1.endpoints.size() == 3);
  CHECK(m1.endpoints[0] == 0.0);
  CHECK(m1.endpoints[1] == doctest::Approx(kGolden).epsilon(1e-13));
  CHECK(m1.endpoints[2] == 1.0);

  CircleMap mh = mp_map(0.5);
  double r = mp_preimage_oracle(0.5, 1.0);  // r (1 + sqrt r) = 1
  CHECK(r == doctest::Approx(0.5698402909980533).epsilon(1e-12));
  CHECK(mh.endpoints[1] == doctest::Approx(r).epsilon(1e-12));

  CircleMap d = doubling_map();
  CHECK(d.endpoints[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("inverse branches and preimages on M_1") {
  CircleMap m = mp_map(1.0);
  CHECK(inverse_branch(m, 0.0, 0) == 0.0);
  CHECK(inverse_branch(m, 0.5, 0) == doctest::Approx(kInvHalfB0).epsilon(1e-13));
  CHECK(inverse_branch(m, 0.5, 1) == doctest::Approx(kInvHalfB1).epsilon(1e-13));

  auto pre0 = preimages(m, 0.0);
  REQUIRE(pre0.size() == 2);
  CHECK(pre0[0] == doctest::Approx(0.0));
  CHECK(pre0[1] == doctest::Approx(kGolden).epsilon(1e-13));

  auto preh = preimages(doubling_map(), 0.5);
  CHECK(preh[0] == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(preh[1] == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("branch cover: preimages map back under T") {
  for (double q : {0.5, 1.0}) {
    CircleMap m = mp_map(q);
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
      double x = rng.uniform();
      auto pre = preimages(m, x);
      REQUIRE(static_cast<int>(pre.size()) == m.branch_count);
      for (double y : pre) CHECK(circle_dist(m.eval(y), x) <= 1e-12);
    }
  }
}

TEST_CASE("inverse branches are strictly increasing") {
  CircleMap m = mp_map(1.0);
  for (int b = 0; b < m.branch_count; ++b) {
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      double y = inverse_branch(m, i / 1000.0, b);
      CHECK(y > prev);
      prev = y;
    }
  }
}

TEST_CASE("lambda_V arc dichotomy") {
  CircleMap m = mp_map(1.0);  // V(x) = x
  CHECK(lambda_v(m, 0.9, 0.1) == doctest::Approx(0.1).epsilon(1e-15));   // arc through 0
  CHECK(lambda_v(m, 0.2, 0.4) == doctest::Approx(0.4).epsilon(1e-15));   // arc avoids 0
  CHECK(lambda_v(m, 0.0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));   // 0 is an endpoint
  CHECK(lambda_v(m, 0.1, 0.6) == doctest::Approx(0.6).epsilon(1e-15));   // antipodal tie -> max
}

TEST_CASE("expansion lemma at specific pairs") {
  CircleMap m = mp_map(1.0);
  auto a = verify_expansion(m, 0.2, 0.21);
  CHECK(a.ok);
  CHECK(a.slack > 0);
  auto b = verify_expansion(m, 0.999, 0.001);  // wraparound branch
  CHECK(b.ok);
  CHECK(b.slack > 0);
  auto c = verify_expansion(m, 0.3, 0.3);
  CHECK(c.ok);
  CHECK(c.slack == 0.0);
  CHECK_THROWS_AS(verify_expansion(m, 0.1, 0.4), RadiusExceeded);
}

TEST_CASE("expansion lemma property: 1e5 random pairs per map") {
  for (double q : {0.5, 1.0, 2.0}) {
    CircleMap m = mp_map(q);
    Rng rng(13);
    int checked = 0;
    while (checked < 100000) {
      double x = rng.uniform();
      double d = m.rho_v * rng.uniform();
      double y = wrap_unit(rng.uniform() < 0.5 ? x + d : x - d);
      if (circle_dist(x, y) >= m.rho_v) continue;
      auto r = verify_expansion(m, x, y);
      CHECK(r.slack >= -1e-12);
      ++checked;
    }
  }
}

TEST_CASE("rho_v satisfies its constraints and is near-maximal") {
  for (double q : {0.5, 1.0, 2.0}) {
    CircleMap m = mp_map(q);
    CHECK(m.rho_v > 0);
    CHECK(m.rho_v < 0.5);
    CHECK(rho_constraints(m, m.rho_v).satisfied());
    // informative maximality probe: double radius must break something
    // (or the search saturated its 0.49 cap)
    if (m.rho_v < 0.49) CHECK_FALSE(rho_constraints(m, 2.0 * m.rho_v).satisfied());
  }
  // frozen expectation for M_1: constraint (i) gives 3 rho < 1/2
  CircleMap m1 = mp_map(1.0);
  CHECK(m1.rho_v == doctest::Approx(1.0 / 6.0).epsilon(0.02));
}

TEST_CASE("paired preorbits contract") {
  CircleMap m = mp_map(1.0);

  // diagonal stays diagonal
  std::vector<int> seq5 = {0, 1, 0, 1, 1};
  auto diag = paired_preorbit(m, 0.3, 0.3, seq5);
  for (std::size_t j = 0; j < diag.pairs.size(); ++j) CHECK(diag.dist(j) == 0.0);

  // single branch-1 step
  std::vector<int> one = {1};
  auto po1 = paired_preorbit(m, 0.30, 0.31, one);
  CHECK(po1.dist(1) <= 0.01);

  // ten branch-0 steps: distances non-increasing
  std::vector<int> zeros(10, 0);
  auto po0 = paired_preorbit(m, 0.30, 0.31, zeros);
  for (std::size_t j = 1; j < po0.pairs.size(); ++j) CHECK(po0.dist(j) <= po0.dist(j - 1) * (1 + 1e-12));
  CHECK(po0.dist(10) <= 0.01);

  CHECK_THROWS_AS(paired_preorbit(m, 0.1, 0.4, one), RadiusExceeded);
}

TEST_CASE("pre-orbit contraction, exhaustive to depth 6 on M_1") {
  CircleMap m = mp_map(1.0);
  Rng rng(17);
  auto seqs = all_branch_sequences(m.branch_count, 6);
  REQUIRE(seqs.size() == 64);
  for (int trial = 0; trial < 20; ++trial) {
    double x = rng.uniform();
    double d = m.rho_v * 0.9 * std::max(rng.uniform(), 1e-6);
    double y = wrap_unit(x + d);
    if (circle_dist(x, y) >= m.rho_v) continue;
    double d0 = circle_dist(x, y);
    for (auto& seq : seqs) {
      auto po = paired_preorbit(m, x, y, seq);
      for (std::size_t j = 1; j < po.pairs.size(); ++j) {
        CHECK(po.dist(j) <= d0 * (1 + 1e-12));
        CHECK(po.dist(j) <= po.dist(j - 1) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("derivative product identity") {
  CircleMap m1 = mp_map(1.0);
  std::vector<int> zeros3 = {0, 0, 0};
  // orientation: lambda_V(x, y) = V(x) needs the larger point first off the arc
  CHECK(derivative_product_identity(m1, 0.31, 0.30, zeros3));

  std::vector<int> seq5 = {0, 1, 0, 1, 1};
  CHECK(derivative_product_identity(m1, 0.3, 0.3, seq5));  // diagonal: both sides equal

  CircleMap mh = mp_map(0.5);
  std::vector<int> mixed = {1, 0, 1, 0};
  CHECK(derivative_product_identity(mh, 0.405, 0.40, mixed));

  CHECK_THROWS_AS(derivative_product_identity(m1, 0.30, 0.31, zeros3), PreconditionViolated);
}

TEST_CASE("slowly varying and power-log profiles build valid maps") {
  CircleMap t1 = build_map(VelocityProfile::slowly_varying(1, 1.0));
  CHECK(t1.branch_count == 2);
  CHECK(t1.rho_v > 0.01);
  CHECK(t1.endpoints[1] > 0.4);
  CHECK(t1.endpoints[1] < 0.6);
  // V continuous across the splice
  double xs = t1.profile.splice_x;
  CHECK(t1.profile(xs - 1e-12) == doctest::Approx(t1.profile(xs + 1e-12)).epsilon(1e-8));

  CircleMap pl = build_map(VelocityProfile::power_times_log(0.3, "damped"));
  CHECK(pl.branch_count == 2);
  CHECK(pl.rho_v > 0.01);
  CircleMap pl2 = build_map(VelocityProfile::power_times_log(0.0, "sqrtexp"));
  CHECK(pl2.branch_count == 2);

  // V(1) integer validation
  CHECK_THROWS_AS(VelocityProfile::custom({0.0, 1.0}, {0.0, 1.5}), ConfigError);
  // monotonicity validation
  CHECK_THROWS_AS(VelocityProfile::custom({0.0, 0.5, 1.0}, {0.0, 0.9, 0.5}), ConfigError);
}

TEST_CASE("custom tabulated profile matches its samples") {
  std::vector<double> xs = {0.0, 0.2, 0.5, 0.8, 1.0};
  std::vector<double> vs = {0.0, 0.1, 0.45, 0.8, 1.0};
  auto v = VelocityProfile::custom(xs, vs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(v(xs[i]) == doctest::Approx(vs[i]));
  // monotone between samples
  double prev = -1;
  for (int i = 0; i <= 200; ++i) {
    double val = v(i / 200.0);
    CHECK(val >= prev - 1e-12);
    prev = val;
  }
  CircleMap m = build_map(v);
  CHECK(m.branch_count == 2);
}
