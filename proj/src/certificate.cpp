#include "ispec/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ispec/errors.hpp"
#include "ispec/rng.hpp"

namespace ispec {
namespace {

// Start pairs mixing bulk positions, near-origin base points (where the
// indifferent fixed point makes the inequality tightest) and wraparound
// pairs, with log-spaced separations.
std::vector<std::pair<double, double>> sample_pairs(double radius, int count,
                                                    double d_exponent_range,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (int p = 0; p < count; ++p) {
    double x;
    switch (p % 3) {
      case 0:
        x = rng.uniform();
        break;
      case 1:
        x = std::pow(10.0, rng.uniform(-8.0, -0.5));  // near the origin
        break;
      default:
        x = wrap_unit(1.0 - std::pow(10.0, rng.uniform(-6.0, -1.0)));  // near wraparound
        break;
    }
    double d = radius * std::pow(10.0, rng.uniform(-d_exponent_range, 0.0));
    double y = wrap_unit(rng.uniform() < 0.5 ? x + d : x - d);
    if (circle_dist(x, y) > 0) out.emplace_back(x, y);
  }
  return out;
}

std::vector<std::vector<int>> sequences_for(const CircleMap& map, int depth, int cap,
                                            std::uint64_t seed) {
  double total = std::pow(map.branch_count, depth);
  if (total <= cap) return all_branch_sequences(map.branch_count, depth);
  Rng rng(seed);
  std::vector<std::vector<int>> out(cap, std::vector<int>(depth));
  for (auto& seq : out)
    for (int& b : seq) b = static_cast<int>(rng.integer(map.branch_count));
  return out;
}

}  // namespace

CompatibilityCertificate compatibility_certificate(const CircleMap& map, const Modulus& omega,
                                                   const Modulus& Omega,
                                                   const CertificateOptions& opt) {
  CompatibilityCertificate cert;
  cert.depth_tested = opt.depth;
  cert.rho_1 = opt.trial_radius > 0 ? opt.trial_radius : 0.5 * map.rho_v;
  if (cert.rho_1 >= map.rho_v)
    throw PreconditionViolated("trial radius must stay below rho_v");

  auto pairs = sample_pairs(cert.rho_1, opt.pair_count, opt.d_exponent_range, opt.seed);
  auto seqs = sequences_for(map, opt.depth, opt.sequence_cap, substream(opt.seed, 9));

  double best = std::numeric_limits<double>::infinity();
  for (auto& [x0, y0] : pairs) {
    double om0 = Omega(circle_dist(x0, y0));
    for (auto& seq : seqs) {
      PairedPreorbit po = paired_preorbit(map, x0, y0, seq);
      double wsum = 0;
      for (std::size_t k = 1; k < po.pairs.size(); ++k) {
        double dk = po.dist(k);
        wsum += omega(dk);
        if (wsum <= 0) continue;
        double ratio = (om0 - Omega(dk)) / wsum;
        if (ratio < best) {
          best = ratio;
          cert.worst_x0 = x0;
          cert.worst_y0 = y0;
          cert.worst_k = static_cast<int>(k);
        }
      }
      ++cert.pairs_tested;
    }
  }
  if (!std::isfinite(best) || best < opt.min_c1) {
    char msg[200];
    std::snprintf(msg, sizeof msg,
                  "no admissible C_1 >= %g (best ratio %.3e at pair (%.6g, %.6g), depth %d)",
                  opt.min_c1, best, cert.worst_x0, cert.worst_y0, cert.worst_k);
    throw CertificateFailed(msg);
  }
  // one part in 1e12 of headroom keeps the recheck margin nonnegative in
  // floating point at the binding combination
  cert.c1 = best * (1.0 - 1e-12);
  cert.margin = recheck_certificate(map, omega, Omega, cert, opt.depth, opt);
  return cert;
}

double recheck_certificate(const CircleMap& map, const Modulus& omega, const Modulus& Omega,
                           const CompatibilityCertificate& cert, int depth,
                           const CertificateOptions& opt) {
  auto pairs = sample_pairs(cert.rho_1, opt.pair_count, opt.d_exponent_range, opt.seed);
  auto seqs = sequences_for(map, depth, opt.sequence_cap, substream(opt.seed, 9));
  double margin = std::numeric_limits<double>::infinity();
  for (auto& [x0, y0] : pairs) {
    double om0 = Omega(circle_dist(x0, y0));
    for (auto& seq : seqs) {
      PairedPreorbit po = paired_preorbit(map, x0, y0, seq);
      double wsum = 0;
      for (std::size_t k = 1; k < po.pairs.size(); ++k) {
        double dk = po.dist(k);
        wsum += omega(dk);
        margin = std::min(margin, om0 - Omega(dk) - cert.c1 * wsum);
      }
    }
  }
  return margin;
}

}  // namespace ispec
