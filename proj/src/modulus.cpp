#include "ispec/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ispec/errors.hpp"
#include "ispec/fit.hpp"
#include "ispec/rng.hpp"

namespace ispec {
namespace {

constexpr double kDomainCap = 0.5;

double log_level(int level, double x) {
  double u = std::log(1.0 / x);
  for (int i = 1; i < level; ++i) u = std::log(u);
  return u;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

Modulus Modulus::power(double exponent) {
  if (!(exponent > 0)) throw ConfigError("power modulus requires a positive exponent");
  Modulus m;
  m.family_ = Family::Power;
  m.exponent_ = exponent;
  m.finalize();
  return m;
}

Modulus Modulus::log_power(double s, std::vector<std::pair<int, double>> factors,
                           double splice) {
  if (s < 0) throw ConfigError("log-power modulus requires s >= 0");
  if (factors.empty() && !(s > 0)) throw ConfigError("log-power modulus is empty");
  int deepest = 0;
  for (auto& [level, e] : factors) {
    if (level < 1 || level > 2) throw ConfigError("log-power levels limited to {1, 2}");
    if (!(e > 0)) throw ConfigError("log-power exponents must be positive");
    deepest = std::max(deepest, level);
  }
  Modulus m;
  m.family_ = Family::LogPower;
  m.s_ = s;
  m.factors_ = std::move(factors);
  if (splice <= 0) {
    // deepest iterated log must stay >= 1.2 on the formula region; this also
    // keeps the level-2 closed forms concave there
    splice = deepest >= 2 ? std::exp(-std::exp(1.2)) : (deepest == 1 ? std::exp(-1.2) : 0.5);
  }
  m.splice_x_ = std::min(splice, 0.45);
  m.spliced_ = !m.factors_.empty();
  m.finalize();
  return m;
}

Modulus Modulus::power_theta(double P, const std::string& theta) {
  if (!(P > 0)) throw ConfigError("power-theta modulus requires P > 0");
  Modulus m;
  m.family_ = Family::PowerTheta;
  m.P_ = P;
  if (theta == "one")
    m.log_plus_ = false;
  else if (theta == "log-plus")
    m.log_plus_ = true;
  else
    throw ConfigError("power-theta variant must be 'one' or 'log-plus'");
  m.finalize();
  return m;
}

Modulus Modulus::custom(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("custom modulus needs >= 2 samples");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]) || ys[i + 1] < ys[i])
      throw ConfigError("custom modulus samples must be increasing and non-decreasing");
  if (!(xs.front() >= 0) || xs.back() > kDomainCap + 1e-12)
    throw ConfigError("custom modulus samples must lie in [0, 1/2]");
  if (ys.front() < 0) throw ConfigError("custom modulus must be nonnegative");
  Modulus m;
  m.family_ = Family::Custom;
  m.xs_ = std::move(xs);
  m.ys_ = std::move(ys);
  m.finalize();
  return m;
}

double Modulus::eval_raw(double x) const {
  switch (family_) {
    case Family::Power:
      return std::pow(x, exponent_);
    case Family::LogPower: {
      double v = s_ > 0 ? std::pow(x, s_) : 1.0;
      for (auto& [level, e] : factors_) v *= std::pow(log_level(level, x), -e);
      return v;
    }
    case Family::PowerTheta: {
      double v = std::pow(x, P_);
      if (log_plus_) v *= 1.0 + std::log(1.0 / x);
      return v;
    }
    case Family::Custom: {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.begin()) throw DomainExceeded("custom modulus evaluated below its samples");
      if (it == xs_.end()) return ys_.back();
      std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return (1 - t) * ys_[i] + t * ys_[i + 1];
    }
  }
  return 0.0;
}

void Modulus::finalize() {
  if (spliced_) {
    splice_y_ = eval_raw(splice_x_);
    double h = splice_x_ * 1e-6;
    splice_slope_ = (eval_raw(splice_x_) - eval_raw(splice_x_ - h)) / h;
    if (!(splice_slope_ > 0) || !std::isfinite(splice_slope_))
      throw ConfigError("log-power splice slope not positive");
  }
  // monotonicity validation on a mixed grid
  double prev_x = 0.0, prev_y = 0.0;
  bool first = true;
  auto probe = [&](double x) {
    double y = (*this)(x);
    if (!std::isfinite(y) || y < -1e-15)
      throw ConfigError("modulus evaluates negative or non-finite: " + describe());
    if (!first && x > prev_x && y < prev_y - 1e-12)
      throw ConfigError("modulus not non-decreasing: " + describe());
    prev_x = x;
    prev_y = y;
    first = false;
  };
  if (family_ == Family::Custom) {
    for (std::size_t i = 0; i < xs_.size(); ++i) probe(xs_[i]);
  } else {
    for (double x : log_spaced(1e-14, kDomainCap, 300)) probe(x);
  }
}

double Modulus::operator()(double x) const {
  if (x < 0) throw DomainExceeded("modulus evaluated at negative argument");
  if (x > kDomainCap * (1 + 1e-12)) throw DomainExceeded("modulus evaluated beyond 1/2");
  if (x == 0) {
    if (family_ == Family::Custom && xs_.front() > 0)
      throw DomainExceeded("custom modulus evaluated below its samples");
    return family_ == Family::Custom ? ys_.front() : 0.0;
  }
  if (spliced_ && x > splice_x_) return splice_y_ + splice_slope_ * (x - splice_x_);
  return eval_raw(std::min(x, kDomainCap));
}

Modulus Modulus::power_scaled(double s) const {
  if (!(s > 0)) throw ConfigError("power scaling requires s > 0");
  switch (family_) {
    case Family::Power:
      return power(exponent_ + s);
    case Family::LogPower: {
      Modulus m;
      m.family_ = Family::LogPower;
      m.s_ = s_ + s;
      m.factors_ = factors_;
      m.splice_x_ = splice_x_;
      m.spliced_ = spliced_;
      m.finalize();
      return m;
    }
    case Family::PowerTheta: {
      Modulus m;
      m.family_ = Family::PowerTheta;
      m.P_ = P_ + s;
      m.log_plus_ = log_plus_;
      m.finalize();
      return m;
    }
    case Family::Custom: {
      std::vector<double> ys(ys_.size());
      for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = ys_[i] * std::pow(xs_[i], s);
      return custom(xs_, ys);
    }
  }
  throw Error("unreachable");
}

bool Modulus::is_concave() const {
  if (concave_cache_ >= 0) return concave_cache_ != 0;
  bool ok = true;
  double lo = family_ == Family::Custom ? std::max(xs_.front(), 1e-14) : 1e-12;
  auto grid = log_spaced(std::max(lo, 1e-14), kDomainCap, 260);
  for (std::size_t i = 0; i + 2 < grid.size() && ok; ++i) {
    for (std::size_t j = i + 1; j < grid.size(); j += 7) {
      double a = grid[i], b = grid[j], mid = 0.5 * (a + b);
      if ((*this)(mid) < 0.5 * ((*this)(a) + (*this)(b)) - 1e-12) {
        ok = false;
        break;
      }
    }
  }
  concave_cache_ = ok ? 1 : 0;
  return ok;
}

bool Modulus::is_subadditive() const {
  if (family_ != Family::Custom && is_concave()) return true;  // with m(0) = 0
  auto grid = log_spaced(family_ == Family::Custom ? std::max(xs_.front(), 1e-12) : 1e-12,
                         kDomainCap / 2, 80);
  for (double a : grid)
    for (double b : grid) {
      if (a + b > kDomainCap) continue;
      if ((*this)(a + b) > (*this)(a) + (*this)(b) + 1e-12) return false;
    }
  return true;
}

std::string Modulus::describe() const {
  char buf[160];
  switch (family_) {
    case Family::Power:
      std::snprintf(buf, sizeof buf, "x^%g", exponent_);
      return buf;
    case Family::LogPower: {
      std::string out = s_ > 0 ? (std::snprintf(buf, sizeof buf, "x^%g", s_), std::string(buf)) : std::string();
      for (auto& [level, e] : factors_) {
        std::snprintf(buf, sizeof buf, "(log^%d 1/x)^-%g", level, e);
        out += (out.empty() ? "" : " * ") + std::string(buf);
      }
      return out;
    }
    case Family::PowerTheta:
      std::snprintf(buf, sizeof buf, log_plus_ ? "x^%g (1+log 1/x)" : "x^%g", P_);
      return buf;
    case Family::Custom:
      std::snprintf(buf, sizeof buf, "custom(%d samples)", static_cast<int>(xs_.size()));
      return buf;
  }
  return "?";
}

double orderly_profile(const Modulus& m, double x, int grid_points, double d_min) {
  if (!(x > 0) || x > 1.0) throw DomainExceeded("orderly profile requires 0 < x <= 1");
  grid_points = std::max(grid_points, 200);
  double sup = 0.0;
  for (double d : log_spaced(d_min, kDomainCap, grid_points)) {
    double denom = m(d);
    if (denom <= 0) continue;
    sup = std::max(sup, m(d * x) / denom);
  }
  return sup;
}

std::vector<double> default_orderly_sequence() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

OrderlyReport vanishes_orderly(const Modulus& m, std::span<const double> x_seq) {
  if (!m.is_concave())
    throw PreconditionViolated("orderly-vanishing test requires a concave modulus");
  OrderlyReport rep;
  rep.table.reserve(x_seq.size());
  bool trending_down = true;
  double prev = -1.0;
  for (double x : x_seq) {
    double p = orderly_profile(m, x);
    rep.table.emplace_back(x, p);
    if (prev >= 0 && p > prev * 1.05) trending_down = false;
    prev = p;
  }
  rep.final_profile = rep.table.back().second;
  rep.pass = trending_down && rep.final_profile < 0.1 && x_seq.back() <= 1e-6 * 1.0001;
  if (!rep.pass) {
    for (auto& [x, p] : rep.table) rep.plateau = std::max(rep.plateau, x <= 1e-3 ? p : 0.0);
  }
  return rep;
}

ConditionScan sufficient_condition_scan(const VelocityProfile& V, const Modulus& omega,
                                        const Modulus& Omega, std::span<const double> c_list) {
  if (!Omega.is_concave())
    throw PreconditionViolated("condition scan requires a concave Omega");
  ConditionScan scan;
  scan.grid = log_spaced(1e-10, 1e-2, 300);
  scan.pass = true;
  for (double c : c_list) {
    ConditionScan::PerC pc;
    pc.c = c;
    std::vector<double> row(scan.grid.size());
    std::vector<double> tail_lx, tail_ly;
    pc.tail_inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
      double x = scan.grid[i];
      double w = omega(x);
      double val = w > 0 ? V(x) / w * (Omega((1 + c) * x) - Omega(x)) : 0.0;
      row[i] = val;
      if (x <= 1e-6) pc.tail_inf = std::min(pc.tail_inf, val);
      if (x <= 1e-4 && val > 0) {
        tail_lx.push_back(std::log(x));
        tail_ly.push_back(std::log(val));
      }
    }
    LinearFit fit = least_squares(tail_lx, tail_ly);
    pc.tail_slope = fit.slope;
    // a genuine positive liminf shows a flat (or rising) tail; systematic
    // power-law decay to 0 shows up as a positive log-log slope long before
    // the values dip under any absolute threshold
    pc.pass = pc.tail_inf >= 1e-6 && pc.tail_slope <= 0.02;
    scan.pass = scan.pass && pc.pass;
    scan.per_c.push_back(pc);
    scan.values.push_back(std::move(row));
  }
  return scan;
}

SeminormPairs SeminormPairs::build(int cells, const Modulus& m, int random_budget,
                                   std::uint64_t seed) {
  SeminormPairs sp;
  sp.cells = cells;
  auto add = [&](int i, int j) {
    i = ((i % cells) + cells) % cells;
    j = ((j % cells) + cells) % cells;
    if (i == j) return;
    int diff = std::min(std::abs(i - j), cells - std::abs(i - j));
    double d = static_cast<double>(diff) / cells;
    if (d <= 0 || d > kDomainCap) return;
    sp.pairs.emplace_back(i, j);
    sp.inv_mod.push_back(1.0 / m(d));
  };
  for (int i = 0; i < cells; ++i) add(i, i + 1);
  for (int sep = 2; sep <= cells / 2; sep *= 2)
    for (int i = 0; i < cells; i += std::max(1, sep / 8)) add(i, i + sep);
  Rng rng(seed);
  for (int r = 0; r < random_budget; ++r)
    add(static_cast<int>(rng.integer(cells)), static_cast<int>(rng.integer(cells)));
  return sp;
}

double SeminormPairs::estimate(std::span<const double> samples) const {
  double sup = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double diff = std::fabs(samples[pairs[k].first] - samples[pairs[k].second]);
    if (diff > 0) sup = std::max(sup, diff * inv_mod[k]);
  }
  return sup;
}

double seminorm_estimate(std::span<const double> samples, const Modulus& m,
                         int random_budget, std::uint64_t seed) {
  return SeminormPairs::build(static_cast<int>(samples.size()), m, random_budget, seed)
      .estimate(samples);
}

}  // namespace ispec
