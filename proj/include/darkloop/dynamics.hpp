// dynamics.hpp - reduced master-equation integration with physicality
// monitors, and the ideal adiabatic-frame propagator.
//
// Convention: D[A]rho = A rho A^dagger - 1/2 {A^dagger A, rho}. The reduced
// model evolves as drho/dt = Gamma * D[R] rho with R = R(r(t), phi(t)) and
// time measured in units of 1/Gamma.

#pragma once

#include "darkloop/linalg.hpp"
#include "darkloop/model.hpp"
#include "darkloop/schedule.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace darkloop::dynamics {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Ket;
using DensityMatrix = linalg::ComplexMatrix;
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr double kDefaultDt = 0.01;
inline constexpr double kFailTraceDeviation = 1e-6;
inline constexpr double kFailMinEigenvalue = -1e-5;

// Which space the reduced model is simulated in: the 16-dim product space
// (leakage out of span{e} is then measurable) or the 12-dim e-basis.
enum class Basis { product, collective };

// Gamma * D[R] rho, dense.
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const ComplexMatrix& jump,
                           double gamma);

// -i[H, rho] + sum_k rate_k D[L_k] rho, with sparse operators. Assumes rho
// Hermitian.
struct SparseGenerator {
  SparseOperator hamiltonian;  // may be empty (0x0)
  std::vector<SparseOperator> jumps;
  std::vector<double> rates;
};

class LindbladEvaluator {
 public:
  explicit LindbladEvaluator(SparseGenerator generator);
  void operator()(const DensityMatrix& rho, DensityMatrix& drho) const;

 private:
  std::vector<SparseOperator> jumps_;
  std::vector<double> rates_;
  SparseOperator drift_;  // -i H - 1/2 sum rate L^dagger L
};

using GeneratorFactory = std::function<SparseGenerator(const ControlPoint&)>;
using TargetFn = std::function<Ket(double t)>;

struct MonitorSample {
  double t = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double trace_deviation = 0.0;
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double leakage = 0.0;
  double purity = 0.0;
  std::optional<double> fidelity;
};

struct MonitorExtrema {
  double max_trace_deviation = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 1.0;
  double max_leakage = 0.0;
  double max_purity = 0.0;
};

enum class RunStatus { ok, failed };

struct Trajectory {
  std::vector<MonitorSample> samples;
  std::vector<DensityMatrix> states;  // parallel to samples when kept
  DensityMatrix final_state;
  std::size_t steps = 0;
  double dt = 0.0;
  RunStatus status = RunStatus::ok;
  std::optional<std::size_t> failure_step;
  std::string failure_reason;

  bool ok() const noexcept { return status == RunStatus::ok; }
  double final_trace_deviation() const;
  MonitorExtrema extrema() const;
  // Columns: t,r,phi,trace_dev,min_eig,leakage[,fidelity],purity
  void write_csv(std::ostream& os) const;
};

struct EvolveOptions {
  double dt = kDefaultDt;
  std::size_t sample_every = 100;
  bool keep_states = false;
  Basis basis = Basis::product;
  TargetFn target;  // optional; kets in the simulation basis
};

// Fixed-step classical RK4 on [0, schedule.total_time()]. The step is
// shrunk so that an integer number of steps lands on the final time.
// Generators are rebuilt at every stage time, rho is re-Hermitized after
// every step. `leakage_projector`, when non-empty, is the projector whose
// complement's population is reported as leakage.
Trajectory integrate(const DensityMatrix& rho0, const Schedule& schedule,
                     const GeneratorFactory& factory, const EvolveOptions& options,
                     const ComplexMatrix& leakage_projector = {});

// Collective reservoir: a single jump operator R(r, phi) at rate gamma.
Trajectory evolve(const DensityMatrix& rho0, const Schedule& schedule, double gamma,
                  const EvolveOptions& options = {});

// Independent reservoirs: R_1 and R_2 built from the per-pair operators,
// each at rate gamma. Product basis only: the per-pair operators do not
// preserve span{e}.
Trajectory evolve_two_reservoirs(const DensityMatrix& rho0, const Schedule& schedule,
                                 double gamma, const EvolveOptions& options = {});

// Ordered product of exp(i G_dark dt) over midpoint slices, with slices
// distributed over segments in proportion to their durations. Returns the
// 4x4 dark-block unitary in the dark-state basis.
ComplexMatrix adiabatic_propagate(const Schedule& schedule, std::size_t steps);

// Helpers for building states in either basis.
Ket to_basis(const Ket& product_ket, Basis basis);
DensityMatrix pure_state(const Ket& v);
double fidelity(const DensityMatrix& rho, const Ket& target);

}  // namespace darkloop::dynamics
