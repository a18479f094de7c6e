#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "phasekit/experiment.hpp"

namespace phasekit {

namespace {

// Flag values are collected as raw strings and merged over the config file,
// so both layers share one parser and one validation pass.
struct FlagSet {
  std::string config;
  std::string phantom;
  std::string size;
  std::string shifts;
  std::string beta;
  std::string snr;
  std::string dshift;
  std::string iters;
  std::string tol;
  std::string seeds;
  std::string out;
  bool dense = false;
  bool power = false;
};

void add_common_options(CLI::App* sub, FlagSet* flags) {
  sub->add_option("--config", flags->config, "key=value config file");
  sub->add_option("--phantom", flags->phantom,
                  "synthetic-real | file-real:PATH | synthetic-complex[:PATH]");
  sub->add_option("--size", flags->size, "grid size N1xN2");
  sub->add_option("--shifts", flags->shifts, "phase shifts d1[,d2]");
  sub->add_option("--beta", flags->beta, "relaxation parameter list");
  sub->add_option("--snr", flags->snr, "Poisson SNR list in dB, or 'none'");
  sub->add_option("--dshift", flags->dshift, "shift-sweep axis values");
  sub->add_option("--iters", flags->iters, "iteration cap");
  sub->add_option("--tol", flags->tol, "stopping tolerance ('inf' disables)");
  sub->add_option("--seeds", flags->seeds, "seed list");
  sub->add_option("--out", flags->out, "output directory");
}

ExperimentConfig build_config(const FlagSet& flags) {
  KeyValues file_values;
  if (!flags.config.empty()) file_values = load_config_file(flags.config);
  KeyValues overrides;
  if (!flags.phantom.empty()) overrides["phantom"] = flags.phantom;
  if (!flags.size.empty()) overrides["size"] = flags.size;
  if (!flags.shifts.empty()) overrides["shifts"] = flags.shifts;
  if (!flags.beta.empty()) overrides["beta"] = flags.beta;
  if (!flags.snr.empty()) overrides["snr"] = flags.snr;
  if (!flags.dshift.empty()) overrides["dshift"] = flags.dshift;
  if (!flags.iters.empty()) overrides["iters"] = flags.iters;
  if (!flags.tol.empty()) overrides["tol"] = flags.tol;
  if (!flags.seeds.empty()) overrides["seeds"] = flags.seeds;
  if (!flags.out.empty()) overrides["out"] = flags.out;
  if (flags.dense && flags.power) throw ConfigError("--dense and --power are exclusive");
  if (flags.dense) overrides["mode"] = "dense";
  if (flags.power) overrides["mode"] = "power";
  return resolve_config(file_values, overrides);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Phase retrieval from quadratically phase-shifted diffraction patterns"};
  app.require_subcommand(1);

  FlagSet flags;
  CLI::App* sub_run = app.add_subcommand("run", "single reconstruction");
  CLI::App* sub_beta = app.add_subcommand("sweep-beta", "sweep the relaxation parameter");
  CLI::App* sub_snr = app.add_subcommand("sweep-snr", "sweep the Poisson noise level");
  CLI::App* sub_shift = app.add_subcommand("sweep-shift", "sweep the quadratic phase shift");
  CLI::App* sub_spectral =
      app.add_subcommand("spectral", "certify the local-convergence spectral gap");
  for (CLI::App* sub : {sub_run, sub_beta, sub_snr, sub_shift, sub_spectral}) {
    add_common_options(sub, &flags);
  }
  sub_spectral->add_flag("--dense", flags.dense, "materialize and run a dense SVD");
  sub_spectral->add_flag("--power", flags.power, "matrix-free power iteration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ExperimentConfig cfg = build_config(flags);
    if (sub_run->parsed()) return cmd_run(cfg);
    if (sub_beta->parsed()) return cmd_sweep_beta(cfg);
    if (sub_snr->parsed()) return cmd_sweep_snr(cfg);
    if (sub_shift->parsed()) return cmd_sweep_shift(cfg);
    if (sub_spectral->parsed()) return cmd_spectral(cfg);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace phasekit
