// pre_elimination.hpp - atoms coupled to the resonant normal mode c before
// the cavity is eliminated:
//   H = (beta_r e^{i phi} S+ + beta_s S) c + h.c.,  jump sqrt(2 kappa) c.
// Used to check the reduced model in the bad-cavity regime.

#pragma once

#include "darkloop/dynamics.hpp"

#include <vector>

namespace darkloop::dynamics {

struct PreEliminationModel {
  int n_max = 3;        // Fock cutoff of c
  double beta_r = 0.0;  // frequency units
  double beta_s = 0.0;
  double kappa = 1.0;

  void validate() const;
  int fock_dim() const noexcept { return n_max + 1; }
  int dim() const noexcept { return model::kDim * fock_dim(); }

  // Reduced squeeze parameter r and rate Gamma = 2 (beta_r^2 - beta_s^2) / kappa.
  double squeeze() const;
  double gamma() const;

  // Couplings that reproduce (r, Gamma) for a fixed ratio kappa / beta_r.
  static PreEliminationModel from_reduced(double r, double gamma,
                                          double kappa_over_beta_r, int n_max);
};

struct OpenSystem {
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> jumps;  // rates folded in
};

// Composite index: atom_index * (n_max + 1) + photon_number.
OpenSystem build_pre_elimination_model(const PreEliminationModel& params, double phi);

// Truncated annihilator on the composite space.
ComplexMatrix cavity_annihilator(int n_max);

// rho_atoms (x) |0><0|
DensityMatrix embed_in_vacuum(const DensityMatrix& rho_atoms, int n_max);
// Trace over the cavity mode.
DensityMatrix trace_out_cavity(const DensityMatrix& rho, int n_max);

struct PreEliminationRun {
  Trajectory trajectory;            // on the composite space
  DensityMatrix reduced_final;      // atomic reduced state
  double mean_photon_number = 0.0;  // at the final time
};

// Constant (r, phi) = (params.squeeze(), phi) for `duration`; rho_atoms is
// 16x16. options.dt is capped so RK4 stays stable against the cavity decay.
PreEliminationRun evolve_pre_elimination(const PreEliminationModel& params, double phi,
                                         const DensityMatrix& rho_atoms,
                                         double duration, EvolveOptions options = {});

}  // namespace darkloop::dynamics
