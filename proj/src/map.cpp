#include "ispec/map.hpp"

#include <algorithm>
#include <cmath>

#include "ispec/errors.hpp"

namespace ispec {
namespace {

// Bisection for U(y) = target on [lo, hi], U increasing; runs to the floating
// point fixpoint of the midpoint.
double solve_lift(const CircleMap& map, double target, double lo, double hi) {
  double flo = map.lift(lo) - target;
  double fhi = map.lift(hi) - target;
  if (flo > 1e-12 || fhi < -1e-12)
    throw RootNotBracketed("lift equation not bracketed; profile not monotone?");
  if (flo >= 0) return lo;
  if (fhi <= 0) return hi;
  for (int it = 0; it < 200; ++it) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    double fm = map.lift(mid) - target;
    if (fm < 0)
      lo = mid;
    else
      hi = mid;
  }
  double y = lo + 0.5 * (hi - lo);
  if (std::fabs(map.lift(y) - target) > 1e-13)
    throw ConvergenceFailure("branch inversion residual above 1e-13");
  return y;
}

// sup over x of V(x + rho) - V(x), on a grid dense near 0 where profiles vary
// fastest.
double profile_increment_sup(const VelocityProfile& v, double rho) {
  double sup = v(rho) - v(0.0);
  // log-spaced probes near the origin
  for (double x = 1e-12; x < 1.0 - rho; x *= 1.6) {
    sup = std::max(sup, v(std::min(x + rho, 1.0)) - v(x));
  }
  // linear sweep
  const int n = 800;
  for (int i = 0; i <= n; ++i) {
    double x = (1.0 - rho) * i / n;
    sup = std::max(sup, v(std::min(x + rho, 1.0)) - v(x));
  }
  return sup;
}

}  // namespace

RhoConstraints rho_constraints(const CircleMap& map, double rho) {
  const VelocityProfile& v = map.profile;
  RhoConstraints c;
  c.uniform_increment = rho * map.branch_count + profile_increment_sup(v, rho);
  double min_gap = 1.0;
  for (std::size_t i = 0; i + 1 < map.endpoints.size(); ++i)
    min_gap = std::min(min_gap, circle_dist(map.endpoints[i + 1], map.endpoints[i]));
  c.gap_fraction = rho / (0.5 * min_gap);
  c.wraparound = rho + rho * v(rho) + v(1.0) - (1.0 - rho) * v(1.0 - rho);
  return c;
}

CircleMap build_map(const VelocityProfile& profile) {
  CircleMap map;
  map.profile = profile;
  double v1 = profile(1.0);
  double rounded = std::round(v1);
  if (std::fabs(v1 - rounded) > 1e-9 || rounded < 1.0)
    throw ConfigError("V(1) must be a positive integer");
  map.branch_count = 1 + static_cast<int>(rounded);

  map.endpoints.resize(map.branch_count + 1);
  map.endpoints.front() = 0.0;
  map.endpoints.back() = 1.0;
  for (int i = 1; i < map.branch_count; ++i)
    map.endpoints[i] = solve_lift(map, static_cast<double>(i), 0.0, 1.0);

  // largest feasible radius by bisection (all three constraints are monotone
  // in rho), then a safety factor so every inequality holds strictly
  double lo = 0.0, hi = 0.49;
  if (!rho_constraints(map, 1e-6).satisfied())
    throw ConfigError("no admissible expansion radius found for this profile");
  if (rho_constraints(map, hi).satisfied()) {
    map.rho_v = hi;
    return map;
  }
  lo = 1e-6;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (rho_constraints(map, mid).satisfied())
      lo = mid;
    else
      hi = mid;
  }
  map.rho_v = 0.995 * lo;
  return map;
}

double lambda_v(const CircleMap& map, double x, double y) {
  double gap = std::fabs(x - y);
  // The smallest open arc joining x and y passes through the origin exactly
  // when the direct gap exceeds 1/2 and neither point sits at 0 (a point at 0
  // is an arc endpoint, not interior). Antipodal ties resolve to the
  // complement.
  bool through_zero = gap > 0.5 && std::min(x, y) > 0.0;
  double vx = map.profile(x), vy = map.profile(y);
  return through_zero ? std::min(vx, vy) : std::max(vx, vy);
}

double inverse_branch(const CircleMap& map, double x, int branch) {
  if (branch < 0 || branch >= map.branch_count) throw Error("branch index out of range");
  return solve_lift(map, x + branch, map.endpoints[branch], map.endpoints[branch + 1]);
}

std::vector<double> preimages(const CircleMap& map, double x) {
  std::vector<double> out(map.branch_count);
  for (int b = 0; b < map.branch_count; ++b) out[b] = inverse_branch(map, x, b);
  return out;
}

ExpansionCheck verify_expansion(const CircleMap& map, double x, double y) {
  double d = circle_dist(x, y);
  if (d >= map.rho_v) throw RadiusExceeded("pair distance not below rho_v");
  if (d == 0.0) return {true, 0.0};
  double lhs = circle_dist(map.eval(x), map.eval(y));
  double slack = lhs - d * (1.0 + lambda_v(map, x, y));
  return {slack >= -1e-12, slack};
}

PairedPreorbit paired_preorbit(const CircleMap& map, double x0, double y0,
                               std::span<const int> branch_seq) {
  if (circle_dist(x0, y0) >= map.rho_v)
    throw RadiusExceeded("start pair distance not below rho_v");
  PairedPreorbit po;
  po.pairs.reserve(branch_seq.size() + 1);
  po.pairs.emplace_back(x0, y0);
  po.branches.assign(branch_seq.begin(), branch_seq.end());
  double x = x0, y = y0;
  for (int b : branch_seq) {
    x = inverse_branch(map, x, b);
    if (y == po.pairs.back().first) {
      y = x;  // diagonal stays diagonal
    } else {
      double best = -1.0, bd = 2.0;
      for (int bb = 0; bb < map.branch_count; ++bb) {
        double cand = inverse_branch(map, y, bb);
        double d = circle_dist(cand, x);
        if (d < bd) {
          bd = d;
          best = cand;
        }
      }
      y = best;
    }
    po.pairs.emplace_back(x, y);
  }
  return po;
}

std::vector<std::vector<int>> all_branch_sequences(int branch_count, int depth) {
  std::vector<std::vector<int>> out;
  std::vector<int> seq(depth, 0);
  while (true) {
    out.push_back(seq);
    int i = depth - 1;
    while (i >= 0 && seq[i] == branch_count - 1) seq[i--] = 0;
    if (i < 0) break;
    ++seq[i];
  }
  return out;
}

bool derivative_product_identity(const CircleMap& map, double x, double y,
                                 std::span<const int> branch_seq, double rel_tol) {
  double vx = map.profile(x);
  if (x != y && std::fabs(lambda_v(map, x, y) - vx) > 1e-14 * (1.0 + vx))
    throw PreconditionViolated("identity requires lambda_V(x, y) = V(x)");
  PairedPreorbit po = paired_preorbit(map, x, y, branch_seq);
  for (std::size_t j = 0; j < po.pairs.size(); ++j)
    if (po.dist(j) >= map.rho_v)
      throw PreconditionViolated("intermediate pair distance exceeds rho_v");
  double lhs = 1.0, rhs = 1.0;
  for (std::size_t j = 1; j < po.pairs.size(); ++j) {
    auto [xj, yj] = po.pairs[j];
    lhs *= 1.0 + (xj == yj ? map.profile(xj) : lambda_v(map, xj, yj));
    rhs *= 1.0 + map.profile(xj);
  }
  return std::fabs(lhs - rhs) <= rel_tol * std::max(lhs, rhs);
}

}  // namespace ispec
