// feasibility.hpp - scalar estimates tying the reduced model to physical
// cavity-QED parameters. Rates in MHz (1e6 / s), gate time in ms.

#pragma once

#include <string>
#include <vector>

namespace darkloop::experiments {

struct PhysicalParams {
  double g = 2000.0;      // atom-cavity coupling
  double kappa = 10.0;    // cavity decay
  double gamma = 10.0;    // atomic spontaneous emission
  double kappa_f = 10.0;  // fiber mode decay
  double nu = 20000.0;    // cavity-fiber coupling
  double omega_over_2delta = 0.70710678118654752e-3;  // Omega / (2 Delta)

  // Throws std::invalid_argument unless every rate is positive.
  void validate() const;
};

struct FeasibilityReport {
  double beta = 0.0;        // g * Omega / (2 Delta)
  double gamma_reduced = 0.0;  // 2 beta^2 / kappa (beta_s -> 0)
  double gamma_eff = 0.0;   // gamma * Omega^2 / (2 Delta^2)
  double kappa_eff = 0.0;   // kappa_f * Omega^2 g^2 / (4 Delta^2 nu^2)
  double gamma_ratio = 0.0;  // Gamma / gamma_eff
  double gate_time_ms = 0.0;
  bool kappa_eff_below_gamma_eff = false;
  std::vector<std::string> warnings;
};

FeasibilityReport feasibility(const PhysicalParams& params, double loop_t3_in_inverse_gamma);

}  // namespace darkloop::experiments
