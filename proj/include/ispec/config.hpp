#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ispec/modulus.hpp"
#include "ispec/potential.hpp"
#include "ispec/velocity.hpp"

namespace ispec {

// Parsed experiment configuration. The JSON schema is documented in the
// README; presets mirror the standard example families.
struct ExperimentConfig {
  nlohmann::json raw;

  VelocityProfile map_profile;
  Modulus omega;
  Modulus Omega;
  double scale_s = 0.0;  // optional x^s power-scaling applied to both moduli

  // potential spec (constructed against omega)
  Potential potential;

  int grid_m = 4096;
  std::uint64_t seed = 0;

  // check stage
  int check_depth = 5;
  double trial_radius_frac = 0.5;
  int check_pair_count = 160;
  std::vector<double> c_list = {0.01, 0.05, 0.1};

  // rpf stage
  double rpf_tol = 1e-12;
  int rpf_max_iter = 100000;

  // dfly stage
  std::vector<int> dfly_n_list = {1, 2, 4, 8};
  int dfly_pair_budget = 10000;

  // gap stage
  int gap_n_max = 40;

  // decay stage
  int decay_n_max = 60;

  // clt stage
  int clt_n_orbit = 1000;
  int clt_n_samples = 20000;

  std::string hash() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig preset(const std::string& name);
  static nlohmann::json preset_json(const std::string& name);
  static std::vector<std::string> preset_names();
};

Modulus modulus_from_json(const nlohmann::json& j);

}  // namespace ispec
