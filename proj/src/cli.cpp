#include "ispec/cli.hpp"

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ispec/errors.hpp"
#include "ispec/io.hpp"
#include "ispec/pipeline.hpp"

namespace ispec {
namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_force) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  cmd->add_option("--preset", args.preset,
                  "built-in preset: mp-admissible | mp-violating | slowly-varying-k1 | "
                  "doubling-oracle");
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  if (with_force) cmd->add_flag("--force", args.force, "skip the check-stage gate");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  if (args.config_path.empty() == args.preset.empty())
    throw ConfigError("provide exactly one of --config or --preset");
  if (!args.preset.empty()) return ExperimentConfig::preset(args.preset);
  return ExperimentConfig::from_file(args.config_path);
}

void print_result(const StageResult& r) {
  std::printf("[%s] %s\n", r.verdict.c_str(), r.stage.c_str());
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"intermittent circle maps: transfer-operator spectral laboratory"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* c_check = app.add_subcommand("check", "moduli compatibility scans + certificate");
  CLI::App* c_rpf = app.add_subcommand("rpf", "leading eigendata (chi, h, nu, mu)");
  CLI::App* c_dfly = app.add_subcommand("dfly", "theta/tau sequences and the pointwise inequality");
  CLI::App* c_gap = app.add_subcommand("gap", "spectral gap estimate on zero-mean observables");
  CLI::App* c_decay = app.add_subcommand("decay", "correlation decay fits");
  CLI::App* c_clt = app.add_subcommand("clt", "empirical central limit theorem");
  CLI::App* c_report = app.add_subcommand("report", "consolidated markdown report");
  add_common(c_check, args, false);
  add_common(c_rpf, args, true);
  add_common(c_dfly, args, false);
  add_common(c_gap, args, false);
  add_common(c_decay, args, false);
  add_common(c_clt, args, false);
  c_report->add_option("--out", args.out_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_report->parsed()) {
      std::string md = Pipeline::write_report(args.out_dir);
      std::fputs(md.c_str(), stdout);
      return 0;
    }
    Pipeline pipe(resolve_config(args), args.out_dir);
    if (c_check->parsed()) print_result(pipe.run_check());
    if (c_rpf->parsed()) print_result(pipe.run_rpf(args.force));
    if (c_dfly->parsed()) print_result(pipe.run_dfly());
    if (c_gap->parsed()) print_result(pipe.run_gap());
    if (c_decay->parsed()) print_result(pipe.run_decay());
    if (c_clt->parsed()) print_result(pipe.run_clt());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const CertificateFailed& e) {
    std::fprintf(stderr, "certificate failed: %s\n", e.what());
    return 3;
  } catch (const NoConvergence& e) {
    std::fprintf(stderr, "no convergence: %s\n", e.what());
    return 4;
  } catch (const MissingArtifact& e) {
    std::fprintf(stderr, "missing artifact: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace ispec
