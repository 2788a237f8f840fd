#include "ispec/config.hpp"

#include <fstream>

#include "ispec/errors.hpp"
#include "ispec/io.hpp"

namespace ispec {
namespace {

VelocityProfile profile_from_json(const nlohmann::json& j) {
  std::string family = j.at("family").get<std::string>();
  if (family == "manneville-pomeau") return VelocityProfile::manneville_pomeau(j.at("q").get<double>());
  if (family == "slowly-varying")
    return VelocityProfile::slowly_varying(j.at("k").get<int>(), j.value("A", 1.0));
  if (family == "power-log")
    return VelocityProfile::power_times_log(j.at("sigma").get<double>(),
                                            j.value("variant", "damped"));
  if (family == "doubling") return VelocityProfile::flat_oracle(1);
  if (family == "custom")
    return VelocityProfile::custom(j.at("xs").get<std::vector<double>>(),
                                   j.at("vs").get<std::vector<double>>(),
                                   j.value("allow_flat", false));
  throw ConfigError("unknown map family: " + family);
}

Potential potential_from_json(const nlohmann::json& j, const Modulus& omega) {
  std::string kind = j.value("kind", "zero");
  if (kind == "zero") return Potential::zero();
  if (kind == "cosine") return Potential::cosine(j.at("amplitude").get<double>());
  if (kind == "modulus-cone")
    return Potential::modulus_cone(j.at("center").get<double>(), j.at("scale").get<double>(),
                                   omega);
  throw ConfigError("unknown potential kind: " + kind);
}

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

Modulus modulus_from_json(const nlohmann::json& j) {
  std::string family = j.at("family").get<std::string>();
  if (family == "power") return Modulus::power(j.at("exponent").get<double>());
  if (family == "log-power") {
    std::vector<std::pair<int, double>> factors;
    for (auto& f : j.at("factors")) factors.emplace_back(f.at(0).get<int>(), f.at(1).get<double>());
    return Modulus::log_power(j.value("s", 0.0), std::move(factors), j.value("splice", -1.0));
  }
  if (family == "power-theta")
    return Modulus::power_theta(j.at("P").get<double>(), j.value("theta", "one"));
  if (family == "custom")
    return Modulus::custom(j.at("xs").get<std::vector<double>>(),
                           j.at("ys").get<std::vector<double>>());
  throw ConfigError("unknown modulus family: " + family);
}

std::string ExperimentConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(raw.dump())));
  return buf;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  try {
    Modulus omega = modulus_from_json(j.at("omega"));
    Modulus Omega = modulus_from_json(j.at("Omega"));
    double s = j.value("scale_s", 0.0);
    if (s > 0) {
      omega = omega.power_scaled(s);
      Omega = Omega.power_scaled(s);
    }
    ExperimentConfig cfg{.raw = j,
                         .map_profile = profile_from_json(j.at("map")),
                         .omega = omega,
                         .Omega = Omega,
                         .scale_s = s,
                         .potential = potential_from_json(j.value("potential", nlohmann::json::object()), omega)};
    cfg.grid_m = j.value("grid_m", 4096);
    if (!power_of_two(cfg.grid_m) || cfg.grid_m < 64 || cfg.grid_m > 65536)
      throw ConfigError("grid_m must be a power of two in [2^6, 2^16]");
    if (!j.contains("seed")) throw ConfigError("seed is mandatory");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("check")) {
      auto& c = j.at("check");
      cfg.check_depth = c.value("depth", cfg.check_depth);
      cfg.trial_radius_frac = c.value("trial_radius_frac", cfg.trial_radius_frac);
      cfg.check_pair_count = c.value("pair_count", cfg.check_pair_count);
      cfg.c_list = c.value("c_list", cfg.c_list);
    }
    if (!(cfg.trial_radius_frac > 0) || !(cfg.trial_radius_frac < 1))
      throw ConfigError("trial_radius_frac must lie in (0, 1)");
    if (j.contains("rpf")) {
      auto& c = j.at("rpf");
      cfg.rpf_tol = c.value("tol", cfg.rpf_tol);
      cfg.rpf_max_iter = c.value("max_iter", cfg.rpf_max_iter);
    }
    if (j.contains("dfly")) {
      auto& c = j.at("dfly");
      cfg.dfly_n_list = c.value("n_list", cfg.dfly_n_list);
      cfg.dfly_pair_budget = c.value("pair_budget", cfg.dfly_pair_budget);
    }
    if (j.contains("gap")) cfg.gap_n_max = j.at("gap").value("n_max", cfg.gap_n_max);
    if (j.contains("decay")) cfg.decay_n_max = j.at("decay").value("n_max", cfg.decay_n_max);
    if (j.contains("clt")) {
      auto& c = j.at("clt");
      cfg.clt_n_orbit = c.value("n_orbit", cfg.clt_n_orbit);
      cfg.clt_n_samples = c.value("n_samples", cfg.clt_n_samples);
    }
    if (cfg.clt_n_orbit < 1000) throw ConfigError("clt n_orbit must be >= 1000");
    if (cfg.clt_n_samples < 10000) throw ConfigError("clt n_samples must be >= 10000");
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::preset_json(const std::string& name) {
  nlohmann::json j{
      {"grid_m", 4096},
      {"seed", 20260801},
      {"check", {{"depth", 5}, {"trial_radius_frac", 0.5}, {"pair_count", 160}, {"c_list", {0.01, 0.05, 0.1}}}},
      {"rpf", {{"tol", 1e-12}, {"max_iter", 100000}}},
      {"dfly", {{"n_list", {1, 2, 4, 8}}, {"pair_budget", 12000}}},
      {"gap", {{"n_max", 40}}},
      {"decay", {{"n_max", 60}}},
      {"clt", {{"n_orbit", 1000}, {"n_samples", 20000}}},
  };
  if (name == "mp-admissible") {
    j["map"] = {{"family", "manneville-pomeau"}, {"q", 0.5}};
    j["omega"] = {{"family", "power"}, {"exponent", 0.8}};
    j["Omega"] = {{"family", "power"}, {"exponent", 0.3}};
    j["potential"] = {{"kind", "modulus-cone"}, {"center", 0.37}, {"scale", 0.1}};
  } else if (name == "mp-violating") {
    j["map"] = {{"family", "manneville-pomeau"}, {"q", 0.5}};
    j["omega"] = {{"family", "power"}, {"exponent", 0.6}};
    j["Omega"] = {{"family", "power"}, {"exponent", 0.3}};
    j["potential"] = {{"kind", "modulus-cone"}, {"center", 0.37}, {"scale", 0.1}};
  } else if (name == "slowly-varying-k1") {
    j["map"] = {{"family", "slowly-varying"}, {"k", 1}, {"A", 1.0}};
    j["omega"] = {{"family", "log-power"}, {"s", 0.0}, {"factors", {{1, 2.0}, {2, 2.0}}}};
    j["Omega"] = {{"family", "log-power"}, {"s", 0.0}, {"factors", {{2, 1.0}}}};
    j["scale_s"] = 0.5;
    j["potential"] = {{"kind", "modulus-cone"}, {"center", 0.37}, {"scale", 0.1}};
  } else if (name == "doubling-oracle") {
    j["map"] = {{"family", "doubling"}};
    j["omega"] = {{"family", "power"}, {"exponent", 0.8}};
    j["Omega"] = {{"family", "power"}, {"exponent", 0.5}};
    j["potential"] = {{"kind", "zero"}};
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return j;
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  return from_json(preset_json(name));
}

std::vector<std::string> ExperimentConfig::preset_names() {
  return {"mp-admissible", "mp-violating", "slowly-varying-k1", "doubling-oracle"};
}

}  // namespace ispec
