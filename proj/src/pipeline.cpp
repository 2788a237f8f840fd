#include "ispec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ispec/certificate.hpp"
#include "ispec/errors.hpp"
#include "ispec/fit.hpp"
#include "ispec/rng.hpp"
#include "ispec/spectral.hpp"
#include "ispec/stats.hpp"

namespace ispec {
namespace {

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing artifact " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt artifact " + path.string() + ": " + e.what());
  }
}

Observable cos_observable(const Grid& grid, int k) {
  const double tau = 2.0 * std::numbers::pi;
  return Observable::from_function(grid, [k, tau](double x) { return std::cos(tau * k * x); });
}

}  // namespace

Pipeline::Pipeline(ExperimentConfig cfg, std::filesystem::path out_dir)
    : cfg_(std::move(cfg)), out_(std::move(out_dir)), map_(build_map(cfg_.map_profile)),
      manifest_(RunManifest{}) {
  std::filesystem::create_directories(out_);
  manifest_ = RunManifest::load_or_create(out_, cfg_.hash());
  if (!std::filesystem::exists(out_ / "config.json")) {
    write_json_file(out_ / "config.json", cfg_.raw);
  }
  manifest_.record_file("config.json");
  manifest_.save(out_);
}

void Pipeline::persist_stage(const std::string& stage, const std::string& verdict,
                             const nlohmann::json& summary) {
  manifest_.stages[stage] = verdict;
  write_json_file(out_ / (stage + "_summary.json"), summary);
  manifest_.record_file(stage + "_summary.json");
  manifest_.save(out_);
}

nlohmann::json Pipeline::load_summary(const std::string& stage) const {
  return load_json_file(out_ / (stage + "_summary.json"));
}

StageResult Pipeline::run_check() {
  nlohmann::json summary;
  bool scan_pass = false, orderly_pass = false;

  try {
    ConditionScan scan = sufficient_condition_scan(cfg_.map_profile, cfg_.omega, cfg_.Omega,
                                                   cfg_.c_list);
    scan_pass = scan.pass;
    CsvWriter csv({"c", "x", "value"});
    for (std::size_t ci = 0; ci < scan.per_c.size(); ++ci)
      for (std::size_t i = 0; i < scan.grid.size(); ++i)
        csv.row({scan.per_c[ci].c, scan.grid[i], scan.values[ci][i]});
    csv.save(out_ / "condition_scan.csv");
    manifest_.record_file("condition_scan.csv");
    summary["condition"]["pass"] = scan.pass;
    for (auto& pc : scan.per_c)
      summary["condition"]["per_c"].push_back(
          {{"c", pc.c}, {"tail_inf", pc.tail_inf}, {"tail_slope", pc.tail_slope}, {"pass", pc.pass}});

    auto seq = default_orderly_sequence();
    OrderlyReport orderly = vanishes_orderly(cfg_.Omega, seq);
    orderly_pass = orderly.pass;
    CsvWriter ocsv({"x", "profile"});
    for (auto& [x, p] : orderly.table) ocsv.row({x, p});
    ocsv.save(out_ / "orderly_profile.csv");
    manifest_.record_file("orderly_profile.csv");
    summary["orderly"] = {{"pass", orderly.pass},
                          {"final_profile", orderly.final_profile},
                          {"plateau", orderly.plateau}};
  } catch (const PreconditionViolated& e) {
    throw ConfigError(e.what());
  }

  CertificateOptions copt;
  copt.depth = cfg_.check_depth;
  copt.trial_radius = cfg_.trial_radius_frac * map_.rho_v;
  copt.pair_count = cfg_.check_pair_count;
  copt.seed = substream(cfg_.seed, 11);
  try {
    CompatibilityCertificate cert = compatibility_certificate(map_, cfg_.omega, cfg_.Omega, copt);
    summary["certificate"] = {{"c1", cert.c1},
                              {"rho_1", cert.rho_1},
                              {"rho_v", map_.rho_v},
                              {"margin", cert.margin},
                              {"depth", cert.depth_tested},
                              {"pairs", cert.pairs_tested},
                              {"worst_k", cert.worst_k}};
  } catch (const CertificateFailed& e) {
    summary["certificate"] = {{"failed", true}, {"reason", e.what()}};
    summary["verdict"] = "FAIL";
    persist_stage("check", "FAIL", summary);
    throw;
  }

  std::string verdict = scan_pass && orderly_pass ? "PASS" : "FAIL";
  summary["verdict"] = verdict;
  persist_stage("check", verdict, summary);
  return {"check", verdict, summary};
}

StageResult Pipeline::run_rpf(bool force) {
  auto it = manifest_.stages.find("check");
  if (!force && (it == manifest_.stages.end() || it->second != "PASS"))
    throw MissingArtifact("rpf requires a passed check stage (or --force)");

  nlohmann::json summary;
  try {
    OperatorBundle b = make_bundle(map_, cfg_.potential, Grid(cfg_.grid_m), cfg_.rpf_tol,
                                   cfg_.rpf_max_iter);
    CsvWriter csv({"node", "h", "nu", "mu"});
    for (int i = 0; i < b.grid.m; ++i)
      csv.row({b.grid.node(i), b.rpf.h[i], b.rpf.nu[i], b.rpf.mu[i]});
    csv.save(out_ / "rpf_eigendata.csv");
    manifest_.record_file("rpf_eigendata.csv");

    std::vector<double> fsamp(b.grid.m);
    for (int i = 0; i < b.grid.m; ++i) fsamp[i] = cfg_.potential(b.grid.node(i));
    double f_semi = seminorm_estimate(fsamp, cfg_.omega, 4000, substream(cfg_.seed, 21));
    if (auto hint = cfg_.potential.seminorm_hint(cfg_.omega)) f_semi = std::max(f_semi, *hint);

    summary = {{"chi", b.rpf.chi},
               {"chi_ulam", b.rpf.chi_ulam},
               {"chi_aitken", b.rpf.chi_aitken},
               {"pressure", b.rpf.pressure},
               {"residual", b.rpf.residual},
               {"normalization_residual", b.normalization_residual},
               {"iterations", b.rpf.iterations},
               {"ulam_iterations", b.rpf.ulam_iterations},
               {"f_seminorm", f_semi},
               {"h_ratio", b.rpf.h.max_value() / b.rpf.h.min_value()},
               {"potential", cfg_.potential.describe()},
               {"map", cfg_.map_profile.describe()}};

    // cone membership against the certificate constants when available
    if (std::filesystem::exists(out_ / "check_summary.json")) {
      nlohmann::json check = load_summary("check");
      if (check.contains("certificate") && check["certificate"].contains("c1")) {
        double c1 = check["certificate"]["c1"].get<double>();
        double rho1 = check["certificate"]["rho_1"].get<double>();
        double kappa = c1 > 0 ? f_semi / c1 : 0.0;
        ConeReport cone = cone_membership(b.rpf.h, kappa, cfg_.Omega, rho1, 20000,
                                          substream(cfg_.seed, 22));
        summary["kappa_f"] = kappa;
        summary["cone_worst_log_violation"] = cone.worst_log_violation;
      }
    }
  } catch (const NoConvergence& e) {
    summary["error"] = e.what();
    persist_stage("rpf", "FAIL", summary);
    throw;
  }
  persist_stage("rpf", "PASS", summary);
  return {"rpf", "PASS", summary};
}

OperatorBundle Pipeline::load_bundle() {
  CsvTable eig = CsvTable::load(out_ / "rpf_eigendata.csv");
  nlohmann::json summary = load_summary("rpf");
  Grid grid(cfg_.grid_m);
  if (static_cast<int>(eig.column("h").size()) != grid.m)
    throw ConfigError("rpf artifacts were produced with a different grid");
  double chi = summary.at("chi").get<double>();
  RPFData rpf{.chi = chi,
              .pressure = std::log(chi),
              .h = Observable(grid, eig.column("h")),
              .nu = eig.column("nu"),
              .mu = eig.column("mu"),
              .residual = summary.value("residual", 0.0),
              .chi_ulam = summary.value("chi_ulam", chi),
              .chi_aitken = summary.value("chi_aitken", chi),
              .iterations = summary.value("iterations", 0),
              .ulam_iterations = summary.value("ulam_iterations", 0)};
  return assemble_bundle(map_, cfg_.potential, grid, std::move(rpf));
}

StageResult Pipeline::run_dfly() {
  OperatorBundle b = load_bundle();
  nlohmann::json check = load_summary("check");
  nlohmann::json rpf = load_summary("rpf");
  if (!check.contains("certificate") || !check["certificate"].contains("c1"))
    throw MissingArtifact("dfly requires a certificate from the check stage");
  double c1 = check["certificate"]["c1"].get<double>();
  double rho1 = check["certificate"]["rho_1"].get<double>();
  double kappa = c1 > 0 ? rpf.at("f_seminorm").get<double>() / c1 : 0.0;

  DFLYOptions opt;
  opt.n_list = cfg_.dfly_n_list;
  opt.pair_budget = cfg_.dfly_pair_budget;
  opt.seed = substream(cfg_.seed, 31);
  DFLYReport rep = dfly_check(b, cfg_.Omega, kappa, rho1, opt);

  int n_top = *std::max_element(opt.n_list.begin(), opt.n_list.end());
  auto theta = theta_series(b, n_top);
  CsvWriter csv({"n", "theta", "tau"});
  for (int n = 0; n <= n_top; ++n)
    csv.row({static_cast<double>(n), theta[n],
             tau_from_theta(cfg_.Omega, std::min(theta[n], 1.0))});
  csv.save(out_ / "dfly_theta.csv");
  manifest_.record_file("dfly_theta.csv");

  std::string verdict = rep.violations == 0 ? "PASS" : "FAIL";
  nlohmann::json summary = {{"gamma_empirical", rep.gamma_empirical},
                            {"gamma_paper", rep.gamma_paper},
                            {"violations", rep.violations},
                            {"pairs_tested", rep.pairs_tested},
                            {"kappa_f", rep.kappa_f},
                            {"h_ratio", rep.h_ratio},
                            {"theta_nonincreasing", rep.theta_nonincreasing},
                            {"n_list", rep.n_values},
                            {"theta", rep.theta},
                            {"tau", rep.tau},
                            {"verdict", verdict}};
  persist_stage("dfly", verdict, summary);
  return {"dfly", verdict, summary};
}

StageResult Pipeline::run_gap() {
  OperatorBundle b = load_bundle();
  GapOptions opt;
  opt.n_max = cfg_.gap_n_max;
  opt.seed = substream(cfg_.seed, 41);
  nlohmann::json summary;
  std::string verdict;
  try {
    GapEstimate est = gap_estimate(b, cfg_.Omega, opt);
    std::vector<std::string> header = {"n"};
    for (auto& t : est.tracks) header.push_back("norm_" + t.name);
    CsvWriter csv(header);
    for (int n = 0; n <= opt.n_max; ++n) {
      std::vector<double> row = {static_cast<double>(n)};
      for (auto& t : est.tracks) row.push_back(t.norms[n]);
      csv.row(row);
    }
    csv.save(out_ / "gap_norms.csv");
    manifest_.record_file("gap_norms.csv");

    verdict = est.pass ? "PASS" : "FAIL";
    summary = {{"rho_hat", est.rho_hat}, {"r2", est.r2}, {"verdict", verdict}};
    for (auto& t : est.tracks)
      summary["tracks"].push_back({{"name", t.name},
                                   {"rho", t.rho},
                                   {"r2", t.r2},
                                   {"fit_points", t.fit_points},
                                   {"annihilated", t.annihilated},
                                   {"contracted_two_thirds", t.contracted_two_thirds}});
  } catch (const SeminormBlowup& e) {
    verdict = "FAIL";
    summary = {{"verdict", "FAIL"}, {"seminorm_blowup", true}, {"reason", e.what()}};
  }
  persist_stage("gap", verdict, summary);
  return {"gap", verdict, summary};
}

StageResult Pipeline::run_decay() {
  OperatorBundle b = load_bundle();
  const Grid& grid = b.grid;
  const double tau = 2.0 * std::numbers::pi;
  std::vector<std::pair<std::string, Observable>> battery;
  battery.emplace_back("cos1", cos_observable(grid, 1));
  battery.emplace_back("sin1", Observable::from_function(
                                   grid, [tau](double x) { return std::sin(tau * x); }));
  battery.emplace_back("cone", Observable::from_function(grid, [this](double x) {
                         return cfg_.Omega(circle_dist(x, 0.15));
                       }));
  battery.emplace_back("sin2", Observable::from_function(
                                   grid, [tau](double x) { return std::sin(2 * tau * x); }));

  std::vector<std::vector<double>> series;
  nlohmann::json summary;
  bool all_pass = true;
  for (auto& [name, phi] : battery) {
    auto corr = correlation_series(b, phi, phi, cfg_.decay_n_max);
    nlohmann::json row = {{"pair", name + "*" + name}};
    try {
      DecayReport rep = decay_fit(corr);
      row["K"] = rep.K;
      row["rho"] = rep.rho;
      row["r2"] = rep.r2;
      row["pass"] = rep.pass;
      row["fit_points"] = rep.fit_points;
      row["floor_n"] = rep.floor_n;
      row["noise_floor"] = rep.noise_floor;
      all_pass = all_pass && rep.pass;
    } catch (const InsufficientSignal& e) {
      // correlations at the quadrature floor from the start (Fourier pairs of
      // the doubling oracle vanish identically): trivially inside any
      // exponential envelope
      double floor = plateau_floor(corr);
      int usable = 0;
      for (std::size_t n = 1; n < corr.size(); ++n)
        if (std::fabs(corr[n]) > floor) ++usable;
      row["annihilated"] = usable <= 2;
      row["pass"] = usable <= 2;
      row["reason"] = e.what();
      all_pass = all_pass && usable <= 2;
    }
    summary["fits"].push_back(row);
    series.push_back(std::move(corr));
  }

  std::vector<std::string> header = {"n"};
  for (auto& [name, phi] : battery) header.push_back("C_" + name);
  CsvWriter csv(header);
  for (int n = 0; n <= cfg_.decay_n_max; ++n) {
    std::vector<double> row = {static_cast<double>(n)};
    for (auto& s : series) row.push_back(s[n]);
    csv.row(row);
  }
  csv.save(out_ / "decay_correlations.csv");
  manifest_.record_file("decay_correlations.csv");

  std::string verdict = all_pass ? "PASS" : "FAIL";
  summary["verdict"] = verdict;
  persist_stage("decay", verdict, summary);
  return {"decay", verdict, summary};
}

StageResult Pipeline::run_clt() {
  OperatorBundle b = load_bundle();
  Observable phi = cos_observable(b.grid, 1);
  nlohmann::json summary;
  std::string verdict;
  try {
    CLTReport rep = clt_test(b, phi, cfg_.clt_n_orbit, cfg_.clt_n_samples,
                             substream(cfg_.seed, 51));
    CsvWriter csv({"index", "normalized_sum"});
    for (std::size_t k = 0; k < rep.sums.size(); ++k)
      csv.row({static_cast<double>(k), rep.sums[k]});
    csv.save(out_ / "clt_samples.csv");
    manifest_.record_file("clt_samples.csv");

    double ratio = rep.gamma_fit > 0 ? rep.gamma_gk / rep.gamma_fit : 0.0;
    bool pass = rep.pass && ratio >= 0.9 && ratio <= 1.1;
    verdict = pass ? "PASS" : "FAIL";
    summary = {{"gamma_gk", rep.gamma_gk},
               {"gamma_gk_sq", rep.gamma_gk * rep.gamma_gk},
               {"gamma_fit", rep.gamma_fit},
               {"gamma_ratio", ratio},
               {"ks", rep.ks},
               {"n_orbit", rep.n_orbit},
               {"n_samples", rep.n_samples},
               {"verdict", verdict}};
  } catch (const DegenerateVariance& e) {
    verdict = "FAIL";
    summary = {{"verdict", "FAIL"}, {"degenerate_variance", true}, {"reason", e.what()}};
  }
  persist_stage("clt", verdict, summary);
  return {"clt", verdict, summary};
}

std::string Pipeline::write_report(const std::filesystem::path& out_dir) {
  RunManifest manifest;
  try {
    manifest = RunManifest::load(out_dir);
  } catch (const MissingArtifact& e) {
    throw ConfigError(e.what());
  }

  std::string md = "# Run report\n\n";
  md += "- config hash: `" + manifest.config_hash + "`\n";
  md += "- tool version: " + manifest.version + "\n\n";
  md += "| stage | verdict | highlights |\n|---|---|---|\n";

  auto highlight = [&](const std::string& stage) -> std::string {
    auto path = out_dir / (stage + "_summary.json");
    if (!std::filesystem::exists(path)) return "";
    nlohmann::json s = load_json_file(path);
    char buf[256];
    if (stage == "check" && s.contains("certificate") && s["certificate"].contains("c1")) {
      std::snprintf(buf, sizeof buf, "C1=%.4g, rho_1=%.4g, margin=%.3g",
                    s["certificate"]["c1"].get<double>(), s["certificate"]["rho_1"].get<double>(),
                    s["certificate"]["margin"].get<double>());
      return buf;
    }
    if (stage == "rpf" && s.contains("chi")) {
      std::snprintf(buf, sizeof buf, "chi=%.9g, residual=%.2e, norm-resid=%.2e",
                    s["chi"].get<double>(), s["residual"].get<double>(),
                    s["normalization_residual"].get<double>());
      return buf;
    }
    if (stage == "dfly" && s.contains("gamma_empirical")) {
      std::snprintf(buf, sizeof buf, "Gamma_emp=%.4g, Gamma=%.4g, violations=%ld",
                    s["gamma_empirical"].get<double>(), s["gamma_paper"].get<double>(),
                    s["violations"].get<long>());
      return buf;
    }
    if (stage == "gap" && s.contains("rho_hat")) {
      std::snprintf(buf, sizeof buf, "rho_hat=%.4g, R2=%.4g", s["rho_hat"].get<double>(),
                    s["r2"].get<double>());
      return buf;
    }
    if (stage == "decay" && s.contains("fits")) {
      std::string out;
      for (auto& f : s["fits"])
        if (f.contains("rho")) {
          std::snprintf(buf, sizeof buf, "%s(K=%.3g, rho=%.3g) ",
                        f["pair"].get<std::string>().c_str(), f["K"].get<double>(),
                        f["rho"].get<double>());
          out += buf;
        }
      return out;
    }
    if (stage == "clt" && s.contains("gamma_gk")) {
      std::snprintf(buf, sizeof buf, "gamma=%.4g, KS=%.4g", s["gamma_gk"].get<double>(),
                    s["ks"].get<double>());
      return buf;
    }
    return "";
  };

  for (const char* stage : {"check", "rpf", "dfly", "gap", "decay", "clt"}) {
    auto it = manifest.stages.find(stage);
    std::string verdict = it == manifest.stages.end() ? "SKIP" : it->second;
    md += std::string("| ") + stage + " | " + verdict + " | " + highlight(stage) + " |\n";
  }
  md += "\n## Files\n\n";
  for (auto& f : manifest.files) md += "- " + f + "\n";

  std::ofstream out(out_dir / "report.md", std::ios::binary);
  if (!out) throw Error("cannot write report.md");
  out << md;
  manifest.record_file("report.md");
  manifest.save(out_dir);
  return md;
}

std::vector<StageResult> run_full_pipeline(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir) {
  Pipeline p(cfg, out_dir);
  std::vector<StageResult> out;
  out.push_back(p.run_check());
  out.push_back(p.run_rpf());
  out.push_back(p.run_dfly());
  out.push_back(p.run_gap());
  out.push_back(p.run_decay());
  out.push_back(p.run_clt());
  Pipeline::write_report(out_dir);
  return out;
}

}  // namespace ispec
