#include "darkloop/experiments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace darkloop::experiments {

namespace {

using dynamics::Basis;
using dynamics::EvolveOptions;
using dynamics::Schedule;
using dynamics::Trajectory;

const model::CollectiveModel& collective() { return model::default_model(); }

const Ket& e(int one_based) { return collective().e_basis[one_based - 1]; }

EvolveOptions evolve_options(const RunOptions& options, double dt,
                             dynamics::TargetFn target) {
  EvolveOptions evolve;
  evolve.dt = dt;
  evolve.sample_every = options.sample_every;
  evolve.basis = options.basis;
  evolve.target = std::move(target);
  return evolve;
}

// Index of e_j in the simulation basis coordinates is only meaningful in the
// e-basis; in the product basis we project onto the ket instead.
Complex coherence(const DensityMatrix& rho, Basis basis, int row, int col) {
  const Ket bra = dynamics::to_basis(e(row), basis);
  const Ket ket = dynamics::to_basis(e(col), basis);
  return bra.dot(rho * ket);
}

struct FidelityRun {
  Trajectory trajectory;
  double fidelity = 0.0;
};

template <typename Runner>
FidelityReport with_convergence(const RunOptions& options, Runner&& run) {
  FidelityRun coarse = run(options.dt);
  FidelityReport report;
  report.fidelity = coarse.fidelity;
  if (options.check_convergence && coarse.trajectory.ok()) {
    const FidelityRun fine = run(0.5 * options.dt);
    report.convergence.checked = true;
    report.convergence.dt = coarse.trajectory.dt;
    report.convergence.fidelity_delta = std::abs(fine.fidelity - coarse.fidelity);
    report.convergence.trace_distance = linalg::trace_distance(
        fine.trajectory.final_state, coarse.trajectory.final_state);
  }
  report.trajectory = std::move(coarse.trajectory);
  return report;
}

}  // namespace

double wrap_phase(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

FidelityReport run_ramp_fidelity(double r0, double duration, const RunOptions& options) {
  if (!(r0 >= 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("run_ramp_fidelity: need r0 >= 0 and T > 0");
  }
  const Basis basis = options.basis;
  const Ket initial = dynamics::to_basis((e(1) + e(2)) / std::sqrt(2.0), basis);
  const Ket final_target = dynamics::to_basis(
      (e(1) + model::dfs_state(collective(), 2, r0, 0.0)) / std::sqrt(2.0), basis);
  const Schedule schedule = Schedule::ramp(r0, duration);
  // Instantaneous target along the ramp.
  const dynamics::TargetFn target = [r0, duration, basis](double t) -> Ket {
    const double r = r0 * t / duration;
    return dynamics::to_basis((e(1) + model::dfs_state(collective(), 2, r, 0.0)) /
                                  std::sqrt(2.0),
                              basis);
  };
  return with_convergence(options, [&](double dt) {
    FidelityRun run;
    run.trajectory = dynamics::evolve(dynamics::pure_state(initial), schedule, 1.0,
                                      evolve_options(options, dt, target));
    run.fidelity = dynamics::fidelity(run.trajectory.final_state, final_target);
    return run;
  });
}

FidelityReport run_loop_fidelity(double r0, double duration, const RunOptions& options) {
  if (!(r0 >= 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("run_loop_fidelity: need r0 >= 0 and T > 0");
  }
  const Basis basis = options.basis;
  const double two_pi = 2.0 * std::numbers::pi;
  const Ket initial = dynamics::to_basis(
      (e(1) + model::dfs_state(collective(), 4, r0, 0.0)) / std::sqrt(2.0), basis);
  // Adiabatically transported state: phase -nu12 * phi accumulated so far.
  const dynamics::TargetFn target = [r0, duration, basis, two_pi](double t) -> Ket {
    const double phi = two_pi * t / duration;
    const Complex phase = std::polar(1.0, -model::nu12(r0) * phi);
    return dynamics::to_basis(
        (e(1) + phase * model::dfs_state(collective(), 4, r0, phi)) / std::sqrt(2.0),
        basis);
  };
  const Ket final_target = target(duration);
  const Schedule schedule = Schedule::phase_loop(r0, two_pi, duration);
  return with_convergence(options, [&](double dt) {
    FidelityRun run;
    run.trajectory = dynamics::evolve(dynamics::pure_state(initial), schedule, 1.0,
                                      evolve_options(options, dt, target));
    run.fidelity = dynamics::fidelity(run.trajectory.final_state, final_target);
    return run;
  });
}

void LoopSpec::validate() const {
  if (!(r0 > 0.0)) throw std::invalid_argument("LoopSpec: r0 must be > 0");
  if (!(0.0 < t1 && t1 < t2 && t2 < t3)) {
    throw std::invalid_argument("LoopSpec: need 0 < T1 < T2 < T3");
  }
  if (!std::isfinite(phi0)) throw std::invalid_argument("LoopSpec: phi0 must be finite");
}

dynamics::Schedule LoopSpec::schedule() const {
  validate();
  return Schedule::three_step_loop(r0, phi0, t1, t2, t3);
}

LoopSpec LoopSpec::cphase(double r0, double t3) {
  LoopSpec spec;
  spec.r0 = r0;
  spec.phi0 = std::numbers::pi / std::abs(2.0 * model::nu1(r0) - model::nu12(r0));
  spec.t1 = 0.05 * t3;
  spec.t2 = 0.95 * t3;
  spec.t3 = t3;
  return spec;
}

LoopSpec LoopSpec::controlled_z(double t3) {
  LoopSpec spec = cphase(model::cz_point(), t3);
  spec.phi0 = std::numbers::pi / model::nu1(spec.r0);
  return spec;
}

Ket loop_output_state(double chi1, double chi12) {
  const Complex p1 = std::polar(1.0, chi1);
  return 0.5 * (e(1) + p1 * e(2) + p1 * e(3) + std::polar(1.0, chi12) * e(10));
}

Ket controlled_z_state() { return -0.5 * (-e(1) + e(2) + e(3) + e(10)); }

double controlled_z_fidelity(const GateReport& report) {
  return dynamics::fidelity(report.final_state,
                            dynamics::to_basis(controlled_z_state(), report.basis));
}

GateReport run_cphase(const LoopSpec& loop, const RunOptions& options,
                      Reservoir reservoir) {
  loop.validate();
  // Independent reservoirs leave span{e}, so they always run in 16 dims.
  const Basis basis =
      reservoir == Reservoir::independent ? Basis::product : options.basis;
  const Schedule schedule = loop.schedule();
  const Ket initial = dynamics::to_basis(0.5 * (e(1) + e(2) + e(3) + e(10)), basis);

  GateReport report;
  report.expected_chi1 = -model::nu1(loop.r0) * loop.phi0;
  report.expected_chi12 = -model::nu12(loop.r0) * loop.phi0;
  report.expected_delta =
      wrap_phase(report.expected_chi12 - 2.0 * report.expected_chi1);
  const Ket ideal =
      dynamics::to_basis(loop_output_state(report.expected_chi1, report.expected_chi12), basis);

  struct Extracted {
    Trajectory trajectory;
    double fidelity, chi1, chi12, coherence;
  };
  const auto simulate = [&](double dt) {
    EvolveOptions evolve = evolve_options(options, dt, nullptr);
    evolve.basis = basis;
    Extracted x;
    x.trajectory = reservoir == Reservoir::collective
                       ? dynamics::evolve(dynamics::pure_state(initial), schedule, 1.0, evolve)
                       : dynamics::evolve_two_reservoirs(dynamics::pure_state(initial),
                                                         schedule, 1.0, evolve);
    const DensityMatrix& rho = x.trajectory.final_state;
    x.fidelity = dynamics::fidelity(rho, ideal);
    const Complex c21 = coherence(rho, basis, 2, 1);
    x.chi1 = std::arg(c21);
    x.chi12 = std::arg(coherence(rho, basis, 10, 1));
    x.coherence = std::abs(c21);
    return x;
  };

  Extracted coarse = simulate(options.dt);
  report.fidelity = coarse.fidelity;
  report.chi1 = coarse.chi1;
  report.chi12 = coarse.chi12;
  report.delta = wrap_phase(coarse.chi12 - 2.0 * coarse.chi1);
  report.coherence = coarse.coherence;
  report.phases_reliable = coarse.coherence >= kReliableCoherence;
  if (options.check_convergence && coarse.trajectory.ok()) {
    const Extracted fine = simulate(0.5 * options.dt);
    report.convergence.checked = true;
    report.convergence.dt = coarse.trajectory.dt;
    report.convergence.fidelity_delta = std::abs(fine.fidelity - coarse.fidelity);
    report.convergence.trace_distance =
        linalg::trace_distance(fine.trajectory.final_state, coarse.trajectory.final_state);
    report.convergence.phase_delta =
        std::max(std::abs(wrap_phase(fine.chi1 - coarse.chi1)),
                 std::abs(wrap_phase(fine.chi12 - coarse.chi12)));
  }
  report.final_state = coarse.trajectory.final_state;
  report.basis = basis;
  report.trajectory = std::move(coarse.trajectory);
  return report;
}

DensityMatrix apply_local_correction(const DensityMatrix& rho, double chi1) {
  if (rho.rows() != model::kDim || rho.cols() != model::kDim) {
    throw linalg::DimensionError("apply_local_correction: rho must be 16x16, got " +
                                 linalg::shape_string(rho));
  }
  Eigen::VectorXcd diag(model::kDim);
  const Complex kick = std::polar(1.0, -chi1);
  for (int p1 = 0; p1 < model::kPairDim; ++p1) {
    for (int p2 = 0; p2 < model::kPairDim; ++p2) {
      Complex phase = 1.0;
      if (p1 == static_cast<int>(model::PairState::minus)) phase *= kick;
      if (p2 == static_cast<int>(model::PairState::minus)) phase *= kick;
      diag(model::kPairDim * p1 + p2) = phase;
    }
  }
  return diag.asDiagonal() * rho * diag.conjugate().asDiagonal();
}

}  // namespace darkloop::experiments
