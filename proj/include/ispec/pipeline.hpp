#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ispec/config.hpp"
#include "ispec/io.hpp"
#include "ispec/transfer.hpp"

namespace ispec {

struct StageResult {
  std::string stage;
  std::string verdict;  // PASS / FAIL
  nlohmann::json summary;
};

// One experiment directory: stages write CSV/JSON artifacts there and append
// verdicts to the run manifest. Later stages load earlier artifacts from disk
// (missing ones raise MissingArtifact).
class Pipeline {
 public:
  Pipeline(ExperimentConfig cfg, std::filesystem::path out_dir);

  StageResult run_check();
  StageResult run_rpf(bool force = false);
  StageResult run_dfly();
  StageResult run_gap();
  StageResult run_decay();
  StageResult run_clt();

  // Consolidated human-readable summary of whatever has run; also saved as
  // report.md.
  static std::string write_report(const std::filesystem::path& out_dir);

  const std::filesystem::path& out_dir() const { return out_; }
  const ExperimentConfig& config() const { return cfg_; }

 private:
  void persist_stage(const std::string& stage, const std::string& verdict,
                     const nlohmann::json& summary);
  nlohmann::json load_summary(const std::string& stage) const;
  OperatorBundle load_bundle();

  ExperimentConfig cfg_;
  std::filesystem::path out_;
  CircleMap map_;
  RunManifest manifest_;
};

// All stages in artifact order; returns the per-stage results.
std::vector<StageResult> run_full_pipeline(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir);

}  // namespace ispec
