// config.hpp - command-line / JSON run configuration.
//
// A JSON config file holds one flat object whose keys match the long flag
// names (dashes or underscores), e.g.
//   {"experiment": "cphase", "r0": 0.5, "t3": 1100, "dt": 0.01}
// Flags given on the command line override file values.

#pragma once

#include "darkloop/feasibility.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace darkloop::cli {

enum class Experiment {
  ramp,
  loop,
  cphase,
  cz,
  holonomy,
  validate_elimination,
  two_reservoirs,
  feasibility,
  dfs_check,
};

std::string to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& name);

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::vector<double> values() const;
};

struct RunConfig {
  Experiment experiment = Experiment::dfs_check;

  std::optional<double> r0;
  std::optional<double> phi0;
  std::optional<double> phi;
  std::optional<double> t;   // ramp / loop duration, elimination window
  std::optional<double> t1;
  std::optional<double> t2;
  std::optional<double> t3;

  double dt = 0.01;
  std::size_t sample_every = 100;
  std::size_t steps = 20000;  // holonomy slices
  int n_max = 3;
  double kappa_ratio = 10.0;  // kappa / beta_r for validate-elimination
  bool check_convergence = true;
  bool collective_basis = false;  // 12-dim e-basis fast path

  std::optional<SweepRange> sweep_r0;
  std::optional<SweepRange> sweep_t;

  experiments::PhysicalParams physical;

  std::string out_dir = ".";
  bool csv = false;
  unsigned jobs = 1;
};

// Usage error; `field` names the offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Thrown for --help; carries the help text.
struct HelpRequested {
  std::string text;
};

// Parses argv (argv[0] is the program name). Throws ConfigError or
// HelpRequested.
RunConfig parse_config(const std::vector<std::string>& args);

// Builds a config from a JSON object text (for tests and --config).
RunConfig config_from_json(const std::string& json_text);

}  // namespace darkloop::cli
