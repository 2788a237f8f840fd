#pragma once

#include <cstdint>

#include "ispec/map.hpp"
#include "ispec/modulus.hpp"

namespace ispec {

// Empirical witness for the pre-orbit compatibility inequality
//   C_1 sum_{j=1..k} omega(d(x_j, y_j)) <= Omega(d(x_0, y_0)) - Omega(d(x_k, y_k))
// over sampled start pairs and branch sequences up to `depth_tested`. The
// reported c1 is the largest constant valid on everything tested (a
// falsifiable lower-bound witness, not the universal constant).
struct CompatibilityCertificate {
  double c1 = 0.0;
  double rho_1 = 0.0;   // pair radius used; < rho_v
  double margin = 0.0;  // worst slack of the inequality at c1 (>= 0)
  int depth_tested = 0;
  long pairs_tested = 0;  // (pair, branch sequence) combinations
  // witness of the binding combination
  double worst_x0 = 0.0, worst_y0 = 0.0;
  int worst_k = 0;
};

struct CertificateOptions {
  int depth = 5;
  double trial_radius = -1.0;  // < 0: rho_v / 2
  int pair_count = 160;
  int sequence_cap = 4096;  // sample sequences when N^depth exceeds this
  std::uint64_t seed = 1;
  double min_c1 = 1e-8;  // below this the certificate is deemed failed
  // pair separations are sampled down to trial_radius * 10^-d_exponent_range;
  // incompatible moduli reveal themselves by c1 collapsing as this grows
  double d_exponent_range = 8.0;
};

// Throws CertificateFailed when no C_1 >= min_c1 fits the sampled evidence.
CompatibilityCertificate compatibility_certificate(const CircleMap& map,
                                                   const Modulus& omega,
                                                   const Modulus& Omega,
                                                   const CertificateOptions& opt);

// Re-checks a certificate's constant at a (possibly smaller) depth; returns
// the worst slack (>= 0 means still valid).
double recheck_certificate(const CircleMap& map, const Modulus& omega,
                           const Modulus& Omega, const CompatibilityCertificate& cert,
                           int depth, const CertificateOptions& opt);

}  // namespace ispec
