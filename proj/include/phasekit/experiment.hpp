#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/forward.hpp"
#include "phasekit/phantom.hpp"
#include "phasekit/solver.hpp"

namespace phasekit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGapFailed = 3;

// Resolved experiment settings. Built from a key=value config file plus flag
// overrides, then validated: one pattern pairs with the real-line constraint
// and a real phantom, two patterns with the full-complex constraint and a
// complex phantom.
struct ExperimentConfig {
  PhantomSpec phantom;
  std::vector<double> shifts;    // 1 or 2 entries
  std::vector<double> betas;     // first entry drives single runs
  std::vector<double> snrs;      // empty = noiseless
  std::vector<double> dshifts;   // axis of the shift sweep
  int max_iter = 0;
  bool iters_given = false;  // explicit iters also caps the spectral power iteration
  double tol = 0.0;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
  bool dense = true;        // spectral mode
  bool mode_given = false;  // was --dense/--power or mode= provided

  ConstraintKind constraint() const {
    return shifts.size() == 1 ? ConstraintKind::RealLine : ConstraintKind::FullComplex;
  }
  std::string image_name() const;
  std::string to_key_values() const;
};

using KeyValues = std::map<std::string, std::string>;

// Parses a plain key=value file (# comments, blank lines allowed).
KeyValues load_config_file(const std::string& path);

// file values first, overrides win, then defaults fill the gaps.
ExperimentConfig resolve_config(const KeyValues& file_values, const KeyValues& overrides);

// One reconstruction cell of a sweep (or a single run).
struct RunArtifacts {
  SolverTrace trace;
  double final_rel_err = 0.0;
  int iters = 0;
  double wall_seconds = 0.0;
};

RunArtifacts run_cell(const ExperimentConfig& cfg, const SpatialImage& x0,
                      const std::vector<double>& shifts, double beta, double snr_db,
                      std::uint64_t seed);

// Subcommand bodies. They create cfg.out_dir and write their artifacts there.
int cmd_run(const ExperimentConfig& cfg);
int cmd_sweep_beta(const ExperimentConfig& cfg);
int cmd_sweep_snr(const ExperimentConfig& cfg);
int cmd_sweep_shift(const ExperimentConfig& cfg);
int cmd_spectral(const ExperimentConfig& cfg);

// Full command-line entry point (subcommands + flags). Returns an exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace phasekit
