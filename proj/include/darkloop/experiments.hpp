// experiments.hpp - ramp, phase-loop and three-step-loop gate experiments on
// the reduced model, geometric-phase extraction and local corrections.

#pragma once

#include "darkloop/dynamics.hpp"

#include <string>

namespace darkloop::experiments {

using dynamics::DensityMatrix;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Ket;

// Largest fidelity change tolerated when dt is halved.
inline constexpr double kConvergenceTol = 1e-6;
// Below this |<e2|rho|e1>| extracted phases are meaningless.
inline constexpr double kReliableCoherence = 0.01;

struct RunOptions {
  double dt = dynamics::kDefaultDt;
  bool check_convergence = true;
  std::size_t sample_every = 100;
  dynamics::Basis basis = dynamics::Basis::product;
};

// Result of re-running with dt / 2.
struct Convergence {
  bool checked = false;
  double dt = 0.0;
  double fidelity_delta = 0.0;
  double trace_distance = 0.0;
  double phase_delta = 0.0;  // max |chi change|, gate runs only
  bool converged() const noexcept {
    return !checked || fidelity_delta <= kConvergenceTol;
  }
};

struct FidelityReport {
  double fidelity = 0.0;
  Convergence convergence;
  dynamics::Trajectory trajectory;  // the dt run
  bool ok() const noexcept { return trajectory.ok(); }
};

// r: 0 -> r0 over T at phi = 0, starting from (|e1> + |e2>)/sqrt2; fidelity
// against (|e1> + |psi_2(r0, 0)>)/sqrt2.
FidelityReport run_ramp_fidelity(double r0, double duration, const RunOptions& options = {});

// phi: 0 -> 2 pi over T at r = r0, starting from (|e1> + |psi_4(r0, 0)>)/sqrt2;
// fidelity against (|e1> + e^{i chi12} |psi_4(r0, 2pi)>)/sqrt2 with
// chi12 = -2 pi nu12(r0).
FidelityReport run_loop_fidelity(double r0, double duration, const RunOptions& options = {});

struct LoopSpec {
  double r0 = 0.0;
  double phi0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;

  void validate() const;
  dynamics::Schedule schedule() const;

  // phi0 = pi / |2 nu1 - nu12|, T1 = 0.05 T3, T2 = 0.95 T3.
  static LoopSpec cphase(double r0, double t3);
  // r0 = cz_point(), phi0 = pi / nu1, same step split.
  static LoopSpec controlled_z(double t3);
};

enum class Reservoir { collective, independent };

struct GateReport {
  double chi1 = 0.0;   // arg <e2|rho|e1>
  double chi12 = 0.0;  // arg <e10|rho|e1>
  double delta = 0.0;  // chi12 - 2 chi1, wrapped to (-pi, pi]
  double expected_chi1 = 0.0;
  double expected_chi12 = 0.0;
  double expected_delta = 0.0;  // wrapped
  double fidelity = 0.0;        // against the ideal loop output
  double coherence = 0.0;       // |<e2|rho|e1>|
  bool phases_reliable = false;
  Convergence convergence;
  DensityMatrix final_state;    // in `basis`
  dynamics::Basis basis = dynamics::Basis::product;
  dynamics::Trajectory trajectory;
  bool ok() const noexcept { return trajectory.ok(); }
};

// Three-step loop from 1/2 (|e1> + |e2> + |e3> + |e10>). Independent
// reservoirs always run in the product basis.
GateReport run_cphase(const LoopSpec& loop, const RunOptions& options = {},
                      Reservoir reservoir = Reservoir::collective);

inline GateReport run_two_reservoirs(const LoopSpec& loop, const RunOptions& options = {}) {
  return run_cphase(loop, options, Reservoir::independent);
}

// 1/2 (|e1> + e^{i chi1}(|e2> + |e3>) + e^{i chi12} |e10>), product basis.
Ket loop_output_state(double chi1, double chi12);
// -1/2 (-|e1> + |e2> + |e3> + |e10>), product basis.
Ket controlled_z_state();
// <Psi''| rho |Psi''> for the final state of a report.
double controlled_z_fidelity(const GateReport& report);

// rho -> U rho U^dagger with U multiplying |-1>_n by e^{-i chi1} on both
// pairs. rho must be 16x16 (product basis).
DensityMatrix apply_local_correction(const DensityMatrix& rho, double chi1);

// Angle wrapped to (-pi, pi].
double wrap_phase(double angle);

}  // namespace darkloop::experiments
