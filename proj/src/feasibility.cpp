#include "darkloop/feasibility.hpp"

#include <stdexcept>

namespace darkloop::experiments {

void PhysicalParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("PhysicalParams: ") + name + " must be > 0");
  };
  positive(g, "g");
  positive(kappa, "kappa");
  positive(gamma, "gamma");
  positive(kappa_f, "kappa_f");
  positive(nu, "nu");
  positive(omega_over_2delta, "omega_over_2delta");
}

FeasibilityReport feasibility(const PhysicalParams& params, double loop_t3_in_inverse_gamma) {
  params.validate();
  if (!(loop_t3_in_inverse_gamma > 0.0)) {
    throw std::invalid_argument("feasibility: T3 must be > 0");
  }
  const double x = params.omega_over_2delta;
  FeasibilityReport rep;
  rep.beta = params.g * x;
  rep.gamma_reduced = 2.0 * rep.beta * rep.beta / params.kappa;
  // Omega^2 / (2 Delta^2) = 2 x^2 and Omega^2 / (4 Delta^2) = x^2.
  rep.gamma_eff = params.gamma * 2.0 * x * x;
  rep.kappa_eff = params.kappa_f * x * x * params.g * params.g / (params.nu * params.nu);
  rep.gamma_ratio = rep.gamma_reduced / rep.gamma_eff;
  // T3 / Gamma in microseconds.
  rep.gate_time_ms = loop_t3_in_inverse_gamma / rep.gamma_reduced * 1e-3;
  rep.kappa_eff_below_gamma_eff = rep.kappa_eff < rep.gamma_eff;

  if (x > 0.1) rep.warnings.emplace_back("Omega/(2 Delta) > 0.1: large-detuning limit is doubtful");
  if (params.kappa_f > params.gamma) rep.warnings.emplace_back("kappa_f > gamma");
  if (params.g >= params.nu) rep.warnings.emplace_back("g^2 << nu^2 does not hold");
  if (!(params.kappa > rep.beta)) rep.warnings.emplace_back("bad-cavity limit kappa >> beta violated");
  return rep;
}

}  // namespace darkloop::experiments
