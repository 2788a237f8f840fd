#include "ispec/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ispec/errors.hpp"

namespace ispec {
namespace {

// k-fold composition of log applied to 1/x
double log_iter(int k, double x) {
  double u = std::log(1.0 / x);
  for (int i = 1; i < k; ++i) u = std::log(u);
  return u;
}

// PCHIP (Fritsch-Carlson) slopes for monotone cubic interpolation
std::vector<double> pchip_slopes(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    delta[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0) {
      d[i] = 0.0;
    } else {
      double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // clamp endpoint slopes to keep monotonicity
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    std::size_t k = (i == 0) ? 0 : n - 2;
    if (delta[k] == 0)
      d[i] = 0;
    else if (d[i] / delta[k] < 0)
      d[i] = 0;
    else if (std::fabs(d[i]) > 3 * std::fabs(delta[k]))
      d[i] = 3 * delta[k];
  }
  return d;
}

double pchip_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::vector<double>& d, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  double h = xs[i + 1] - xs[i], t = (x - xs[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * ys[i] + h10 * h * d[i] + h01 * ys[i + 1] + h11 * h * d[i + 1];
}

}  // namespace

VelocityProfile VelocityProfile::manneville_pomeau(double q) {
  if (!(q > 0)) throw ConfigError("manneville-pomeau requires q > 0");
  VelocityProfile p;
  p.family = VelocityFamily::ManevillePomeau;
  p.q = q;
  p.sigma = q;
  p.v1 = 1;
  return p;
}

VelocityProfile VelocityProfile::slowly_varying(int k, double A) {
  if (k < 1 || k > 3) throw ConfigError("slowly-varying supports k in {1,2,3}");
  if (!(A > 0) || !(A < 1.2))
    throw ConfigError("slowly-varying requires 0 < A < 1.2 so the splice stays monotone");
  VelocityProfile p;
  p.family = VelocityFamily::SlowlyVarying;
  p.k = k;
  p.A = A;
  p.sigma = 0.0;
  p.v1 = 1;
  // formula valid (with margin) where log^k(1/x) >= 1.2; linear up to V(1) = 1
  double level = 1.2;
  for (int i = 1; i < k; ++i) level = std::exp(level);
  p.splice_x = std::exp(-level);
  p.splice_v = A / 1.2;
  p.splice_slope = (1.0 - p.splice_v) / (1.0 - p.splice_x);
  return p;
}

VelocityProfile VelocityProfile::power_times_log(double sigma, const std::string& variant) {
  if (!(sigma >= 0.0) || !(sigma < 1.0))
    throw ConfigError("power-times-log requires sigma in [0, 1)");
  if (variant != "damped" && variant != "sqrtexp")
    throw ConfigError("power-times-log variant must be 'damped' or 'sqrtexp'");
  VelocityProfile p;
  p.family = VelocityFamily::PowerTimesLog;
  p.sigma = sigma;
  p.variant = variant;
  p.v1 = 1;
  return p;
}

VelocityProfile VelocityProfile::custom(std::vector<double> xs, std::vector<double> vs,
                                        bool allow_flat) {
  if (xs.size() != vs.size() || xs.size() < 2) throw ConfigError("custom profile needs >= 2 samples");
  if (xs.front() != 0.0 || xs.back() != 1.0)
    throw ConfigError("custom profile samples must span [0, 1]");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i] < xs[i + 1])) throw ConfigError("custom profile abscissae must increase");
    if (vs[i + 1] < vs[i]) throw ConfigError("custom profile must be non-decreasing");
    if (!allow_flat && !(vs[i] < vs[i + 1]))
      throw ConfigError("custom profile must be strictly increasing (or set allow_flat)");
  }
  if (!allow_flat && vs.front() != 0.0) throw ConfigError("custom profile requires V(0) = 0");
  double v1 = vs.back();
  double rounded = std::round(v1);
  if (std::fabs(v1 - rounded) > 1e-9 || rounded < 1.0)
    throw ConfigError("V(1) must be a positive integer");
  VelocityProfile p;
  p.family = VelocityFamily::Custom;
  p.allow_flat = allow_flat;
  p.v1 = static_cast<int>(rounded);
  p.vs = std::move(vs);
  p.vs.back() = rounded;
  p.xs = std::move(xs);
  p.slopes = pchip_slopes(p.xs, p.vs);
  return p;
}

VelocityProfile VelocityProfile::flat_oracle(int c) {
  if (c < 1) throw ConfigError("flat oracle requires a positive integer value");
  double v = static_cast<double>(c);
  return custom({0.0, 1.0}, {v, v}, /*allow_flat=*/true);
}

double VelocityProfile::operator()(double x) const {
  if (x <= 0.0) {
    if (family == VelocityFamily::Custom) return vs.front();
    return 0.0;
  }
  if (x > 1.0) x = 1.0;
  switch (family) {
    case VelocityFamily::ManevillePomeau:
      return std::pow(x, q);
    case VelocityFamily::SlowlyVarying:
      if (x <= splice_x) return A / log_iter(k, x);
      return splice_v + splice_slope * (x - splice_x);
    case VelocityFamily::PowerTimesLog: {
      double L = std::log(1.0 / x);
      double slow = (variant == "damped") ? 1.0 / (1.0 + L) : std::exp(-std::sqrt(L));
      return (sigma > 0 ? std::pow(x, sigma) : 1.0) * slow;
    }
    case VelocityFamily::Custom:
      return pchip_eval(xs, vs, slopes, x);
  }
  return 0.0;
}

bool VelocityProfile::is_flat() const {
  if (family != VelocityFamily::Custom || !allow_flat) return false;
  for (double v : vs)
    if (v != vs.front()) return false;
  return true;
}

int VelocityProfile::flat_slope() const {
  if (!is_flat()) return 0;
  return 1 + v1;
}

std::string VelocityProfile::describe() const {
  char buf[128];
  switch (family) {
    case VelocityFamily::ManevillePomeau:
      std::snprintf(buf, sizeof buf, "manneville-pomeau(q=%g)", q);
      break;
    case VelocityFamily::SlowlyVarying:
      std::snprintf(buf, sizeof buf, "slowly-varying(k=%d, A=%g)", k, A);
      break;
    case VelocityFamily::PowerTimesLog:
      std::snprintf(buf, sizeof buf, "power-times-log(sigma=%g, %s)", sigma, variant.c_str());
      break;
    case VelocityFamily::Custom:
      if (is_flat())
        std::snprintf(buf, sizeof buf, "flat-oracle(V=%d)", v1);
      else
        std::snprintf(buf, sizeof buf, "custom(%d samples, V1=%d)",
                      static_cast<int>(xs.size()), v1);
      break;
  }
  return buf;
}

}  // namespace ispec
