// runner.hpp - dispatch a RunConfig, write summary.txt and CSV artifacts.

#pragma once

#include "darkloop/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace darkloop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPhysics = 2;

struct SweepRow {
  double r0 = 0.0;
  double t = 0.0;
  double phi0 = 0.0;
  double fidelity = 0.0;
  double chi1 = 0.0;
  double chi12 = 0.0;
  double delta = 0.0;
  bool has_phases = false;
  bool converged = true;
  bool ok = true;
};

// Columns: r0,T,phi0,fidelity,chi1,chi12,Delta,converged
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Runs the experiment, prints the summary to `out` and writes
// <out_dir>/summary.txt (plus trajectory.csv or sweep.csv with --csv).
// Returns 0, 1 (usage) or 2 (physics monitor failure).
int run(const RunConfig& config, std::ostream& out);

// Full CLI entry point: parse, run, map errors to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace darkloop::cli
