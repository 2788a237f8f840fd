#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ispec/circle.hpp"
#include "ispec/velocity.hpp"

namespace ispec {

// Circle map T(x) = x (1 + V(x)) mod 1 together with its branch structure.
//
// The lift U(x) = x (1 + V(x)) is a strictly increasing bijection from [0, 1]
// onto [0, N] with N = 1 + V(1) full branches. `endpoints` holds the branch
// endpoints a_0 = 0 <= a_1 <= ... <= a_N = 1 with U(a_i) = i, and `rho_v` is
// the largest radius (up to a safety factor, capped at 0.49) for which the
// three expansion-lemma constraints hold:
//   (i)   |x-y| < rho_v  =>  |x-y| N + |V(x)-V(y)| < 1/2
//   (ii)  rho_v < (1/2) min_i d(a_{i+1}, a_i)
//   (iii) rho_v + rho_v V(rho_v) + V(1) - (1-rho_v) V(1-rho_v) < 1/2
struct CircleMap {
  VelocityProfile profile;
  int branch_count = 2;            // N = 1 + V(1)
  std::vector<double> endpoints;   // a_0 .. a_N
  double rho_v = 0.0;

  double lift(double x) const { return x * (1.0 + profile(x)); }
  double eval(double x) const { return wrap_unit(lift(x)); }
};

CircleMap build_map(const VelocityProfile& profile);

// Left-hand sides of the three rho_v constraints at radius rho (each must be
// below 1/2 except the middle one, which is reported as rho / (min gap / 2)).
struct RhoConstraints {
  double uniform_increment;  // constraint (i) left side
  double gap_fraction;       // rho / ((1/2) min gap); must be < 1
  double wraparound;         // constraint (iii) left side
  bool satisfied() const {
    return uniform_increment < 0.5 && gap_fraction < 1.0 && wraparound < 0.5;
  }
};
RhoConstraints rho_constraints(const CircleMap& map, double rho);

// lambda_V(x, y): min{V(x), V(y)} when the smallest open arc joining x and y
// contains the origin, max{V(x), V(y)} otherwise. Boundary ties (a point at 0,
// or antipodal pairs) resolve to the max branch.
double lambda_v(const CircleMap& map, double x, double y);

// The unique y in [a_i, a_{i+1}) with T(y) = x, by monotone bisection on the
// lift; |T(y) - x| <= 1e-13 or ConvergenceFailure.
double inverse_branch(const CircleMap& map, double x, int branch);

// All N preimages of x, ascending.
std::vector<double> preimages(const CircleMap& map, double x);

struct ExpansionCheck {
  bool ok;
  double slack;  // d(Tx, Ty) - d(x, y)(1 + lambda_V(x, y))
};
// Checks d(Tx, Ty) >= d(x, y)(1 + lambda_V); requires d(x, y) < rho_v.
ExpansionCheck verify_expansion(const CircleMap& map, double x, double y);

// Pre-orbit pair pulled back branch-by-branch. x follows the given branch
// sequence; at each step y takes its preimage closest to x's (which is the
// order-preserving pairing; the two coincide with same-branch pulls away from
// the wraparound).
struct PairedPreorbit {
  std::vector<std::pair<double, double>> pairs;  // (x_j, y_j), j = 0..depth
  std::vector<int> branches;
  double dist(std::size_t j) const { return circle_dist(pairs[j].first, pairs[j].second); }
  std::size_t depth() const { return branches.size(); }
};
PairedPreorbit paired_preorbit(const CircleMap& map, double x0, double y0,
                               std::span<const int> branch_seq);

// All branch sequences of the given depth, lexicographic.
std::vector<std::vector<int>> all_branch_sequences(int branch_count, int depth);

// Checks prod_j (1 + lambda_V(x_j, y_j)) == prod_j (1 + V(x_j)) over the
// pulled-back pairs j = 1..n. Requires lambda_V(x, y) = V(x) and all
// intermediate distances below rho_v.
bool derivative_product_identity(const CircleMap& map, double x, double y,
                                 std::span<const int> branch_seq,
                                 double rel_tol = 1e-10);

}  // namespace ispec
