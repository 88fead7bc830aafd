#include "darkloop/dynamics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace darkloop::dynamics {

namespace {

SparseOperator to_sparse(const ComplexMatrix& m, double drop_below = 0.0) {
  SparseOperator s(m.rows(), m.cols());
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_below) entries.emplace_back(i, j, m(i, j));
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

// Lowering and raising operators in the chosen simulation basis.
struct CollectiveOperators {
  SparseOperator s_minus;
  SparseOperator s_plus;
  std::array<SparseOperator, 2> pair_minus;
  std::array<SparseOperator, 2> pair_plus;
  ComplexMatrix leakage_projector;  // empty in the e-basis
};

CollectiveOperators collective_operators(Basis basis) {
  const auto& m = model::default_model();
  CollectiveOperators ops;
  if (basis == Basis::product) {
    ops.s_minus = to_sparse(m.s_minus);
    ops.s_plus = to_sparse(m.s_plus);
    for (int n = 0; n < 2; ++n) {
      ops.pair_minus[n] = to_sparse(m.pair_s_minus[n]);
      ops.pair_plus[n] = to_sparse(m.pair_s_plus[n]);
    }
    ops.leakage_projector = m.projector_e;
    return ops;
  }
  // Restriction to span{e} leaves ~1e-17 rounding residue in structural zeros.
  constexpr double drop = 1e-14;
  ops.s_minus = to_sparse(m.restrict_to_e(m.s_minus), drop);
  ops.s_plus = to_sparse(m.restrict_to_e(m.s_plus), drop);
  for (int n = 0; n < 2; ++n) {
    ops.pair_minus[n] = to_sparse(m.restrict_to_e(m.pair_s_minus[n]), drop);
    ops.pair_plus[n] = to_sparse(m.restrict_to_e(m.pair_s_plus[n]), drop);
  }
  return ops;
}

// out = a * x, row by row; a is tiny and very sparse.
void left_multiply(const SparseOperator& a, const DensityMatrix& x, DensityMatrix& out) {
  out.setZero();
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseOperator::InnerIterator it(a, i); it; ++it) {
      out.row(i) += it.value() * x.row(it.col());
    }
  }
}

int expected_dim(Basis basis) {
  return basis == Basis::product ? model::kDim : model::kEDim;
}

MonitorSample measure(const DensityMatrix& rho, double t, const ControlPoint& control,
                      const ComplexMatrix& leakage_projector, const TargetFn& target) {
  MonitorSample s;
  s.t = t;
  s.r = control.r;
  s.phi = control.phi;
  s.trace_deviation = std::abs(rho.trace() - 1.0);
  s.hermiticity_defect = linalg::hermiticity_defect(rho);
  s.min_eigenvalue = linalg::min_eigenvalue(rho);
  s.purity = (rho * rho).trace().real();
  if (leakage_projector.size() > 0) {
    s.leakage = std::max(0.0, (rho.trace() - (leakage_projector * rho).trace()).real());
  }
  if (target) s.fidelity = fidelity(rho, target(t));
  return s;
}

}  // namespace

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const ComplexMatrix& jump,
                           double gamma) {
  if (rho.rows() != rho.cols() || jump.rows() != jump.cols() ||
      rho.rows() != jump.rows()) {
    throw linalg::DimensionError("lindblad_rhs: rho is " + linalg::shape_string(rho) +
                                 ", jump operator is " + linalg::shape_string(jump));
  }
  const ComplexMatrix jump_adj = jump.adjoint();
  const ComplexMatrix k = jump_adj * jump;
  return gamma * (jump * rho * jump_adj - 0.5 * (k * rho + rho * k));
}

LindbladEvaluator::LindbladEvaluator(SparseGenerator generator)
    : jumps_(std::move(generator.jumps)), rates_(std::move(generator.rates)) {
  if (jumps_.size() != rates_.size()) {
    throw std::invalid_argument("LindbladEvaluator: one rate per jump operator required");
  }
  Eigen::Index dim = generator.hamiltonian.rows();
  if (dim == 0 && !jumps_.empty()) dim = jumps_.front().rows();
  drift_.resize(dim, dim);
  if (generator.hamiltonian.rows() > 0) drift_ = Complex(0.0, -1.0) * generator.hamiltonian;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    if (jumps_[k].rows() != dim || jumps_[k].cols() != dim) {
      throw linalg::DimensionError("LindbladEvaluator: jump operator " +
                                   std::to_string(k) + " has the wrong shape");
    }
    SparseOperator decay = SparseOperator(jumps_[k].adjoint()) * jumps_[k];
    drift_ -= (0.5 * rates_[k]) * decay;
  }
  drift_.makeCompressed();
}

void LindbladEvaluator::operator()(const DensityMatrix& rho, DensityMatrix& drho) const {
  // Only left products: L rho L^dagger = L (L rho)^dagger and
  // rho K = (K rho)^dagger for Hermitian rho.
  DensityMatrix x(rho.rows(), rho.cols());
  left_multiply(drift_, rho, x);
  drho = x + x.adjoint();
  DensityMatrix y(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    left_multiply(jumps_[k], rho, x);
    y = x.adjoint();
    left_multiply(jumps_[k], y, x);
    drho += rates_[k] * x;
  }
}

double Trajectory::final_trace_deviation() const {
  return std::abs(final_state.trace() - 1.0);
}

MonitorExtrema Trajectory::extrema() const {
  MonitorExtrema e;
  for (const auto& s : samples) {
    e.max_trace_deviation = std::max(e.max_trace_deviation, s.trace_deviation);
    e.max_hermiticity_defect = std::max(e.max_hermiticity_defect, s.hermiticity_defect);
    e.min_eigenvalue = std::min(e.min_eigenvalue, s.min_eigenvalue);
    e.max_leakage = std::max(e.max_leakage, s.leakage);
    e.max_purity = std::max(e.max_purity, s.purity);
  }
  return e;
}

void Trajectory::write_csv(std::ostream& os) const {
  const bool with_fidelity = !samples.empty() && samples.front().fidelity.has_value();
  os << "t,r,phi,trace_dev,min_eig,leakage," << (with_fidelity ? "fidelity," : "")
     << "purity\n";
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.12e%c", v, sep);
    os << buf;
  };
  for (const auto& s : samples) {
    put(s.t, ',');
    put(s.r, ',');
    put(s.phi, ',');
    put(s.trace_deviation, ',');
    put(s.min_eigenvalue, ',');
    put(s.leakage, ',');
    if (with_fidelity) put(s.fidelity.value_or(0.0), ',');
    put(s.purity, '\n');
  }
}

Trajectory integrate(const DensityMatrix& rho0, const Schedule& schedule,
                     const GeneratorFactory& factory, const EvolveOptions& options,
                     const ComplexMatrix& leakage_projector) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (options.sample_every == 0) {
    throw std::invalid_argument("integrate: sample_every must be >= 1");
  }
  if (rho0.rows() != rho0.cols()) {
    throw linalg::DimensionError("integrate: rho0 is " + linalg::shape_string(rho0));
  }

  const double total = schedule.total_time();
  const auto steps = static_cast<std::size_t>(std::ceil(total / options.dt - 1e-9));
  const double h = total / static_cast<double>(steps);

  Trajectory traj;
  traj.dt = h;
  traj.steps = steps;

  DensityMatrix rho = linalg::hermitian_part(rho0);
  const auto record = [&](std::size_t step) {
    const double t = step == steps ? total : static_cast<double>(step) * h;
    traj.samples.push_back(
        measure(rho, t, schedule.at(t), leakage_projector, options.target));
    if (options.keep_states) traj.states.push_back(rho);
    const MonitorSample& s = traj.samples.back();
    if (s.min_eigenvalue < kFailMinEigenvalue && traj.ok()) {
      traj.status = RunStatus::failed;
      traj.failure_step = step;
      traj.failure_reason = "min eigenvalue " + std::to_string(s.min_eigenvalue) +
                            " below " + std::to_string(kFailMinEigenvalue);
    }
  };
  record(0);

  const Eigen::Index dim = rho.rows();
  DensityMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), probe(dim, dim);
  LindbladEvaluator start(factory(schedule.at(0.0)));
  for (std::size_t n = 0; n < steps && traj.ok(); ++n) {
    const double t = static_cast<double>(n) * h;
    const double t_next = n + 1 == steps ? total : t + h;
    const LindbladEvaluator mid(factory(schedule.at(t + 0.5 * h)));
    LindbladEvaluator end(factory(schedule.at(t_next)));

    start(rho, k1);
    probe = rho + (0.5 * h) * k1;
    mid(probe, k2);
    probe = rho + (0.5 * h) * k2;
    mid(probe, k3);
    probe = rho + h * k3;
    end(probe, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = linalg::hermitian_part(rho);
    start = std::move(end);

    const double trace_dev = std::abs(rho.trace() - 1.0);
    if (trace_dev > kFailTraceDeviation) {
      traj.status = RunStatus::failed;
      traj.failure_step = n + 1;
      traj.failure_reason = "trace deviation " + std::to_string(trace_dev) +
                            " exceeds " + std::to_string(kFailTraceDeviation);
    }
    if ((n + 1) % options.sample_every == 0 || n + 1 == steps || !traj.ok()) {
      record(n + 1);
    }
  }
  traj.final_state = rho;
  return traj;
}

Trajectory evolve(const DensityMatrix& rho0, const Schedule& schedule, double gamma,
                  const EvolveOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("evolve: Gamma must be > 0");
  if (rho0.rows() != expected_dim(options.basis)) {
    throw linalg::DimensionError("evolve: rho0 is " + linalg::shape_string(rho0) +
                                 " but the basis has dimension " +
                                 std::to_string(expected_dim(options.basis)));
  }
  const CollectiveOperators ops = collective_operators(options.basis);
  const GeneratorFactory factory = [&ops, gamma](const ControlPoint& p) {
    SparseGenerator g;
    g.jumps.push_back(std::cosh(p.r) * ops.s_minus +
                      (std::polar(1.0, p.phi) * std::sinh(p.r)) * ops.s_plus);
    g.rates.push_back(gamma);
    return g;
  };
  return integrate(rho0, schedule, factory, options, ops.leakage_projector);
}

Trajectory evolve_two_reservoirs(const DensityMatrix& rho0, const Schedule& schedule,
                                 double gamma, const EvolveOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("evolve_two_reservoirs: Gamma must be > 0");
  if (options.basis != Basis::product) {
    // S_n alone maps |-1,-1> to |0,-1>, which is outside span{e}.
    throw std::invalid_argument(
        "evolve_two_reservoirs: per-pair jumps leave span{e}; use the product basis");
  }
  if (rho0.rows() != expected_dim(options.basis)) {
    throw linalg::DimensionError("evolve_two_reservoirs: rho0 is " +
                                 linalg::shape_string(rho0));
  }
  const CollectiveOperators ops = collective_operators(options.basis);
  const GeneratorFactory factory = [&ops, gamma](const ControlPoint& p) {
    SparseGenerator g;
    const Complex squeeze = std::polar(1.0, p.phi) * std::sinh(p.r);
    for (int n = 0; n < 2; ++n) {
      g.jumps.push_back(std::cosh(p.r) * ops.pair_minus[n] + squeeze * ops.pair_plus[n]);
      g.rates.push_back(gamma);
    }
    return g;
  };
  return integrate(rho0, schedule, factory, options, ops.leakage_projector);
}

ComplexMatrix adiabatic_propagate(const Schedule& schedule, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("adiabatic_propagate: steps must be >= 1");
  ComplexMatrix u = linalg::identity(model::kDfsDim);
  const auto& segments = schedule.segments();
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const double start = schedule.segment_start(k);
    const double duration = segments[k].duration;
    const auto slices = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(
               static_cast<double>(steps) * duration / schedule.total_time())));
    const double h = duration / static_cast<double>(slices);
    for (std::size_t n = 0; n < slices; ++n) {
      const ControlPoint p = schedule.at(start + (static_cast<double>(n) + 0.5) * h);
      const ComplexMatrix g = model::dark_gauge_block(p.r, p.phi, p.rdot, p.phidot);
      const auto eig = linalg::hermitian_eigen(g);
      Eigen::VectorXcd phases(eig.values.size());
      for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::polar(1.0, eig.values(i) * h);
      }
      const ComplexMatrix step =
          eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
      u = step * u;
    }
  }
  return u;
}

Ket to_basis(const Ket& product_ket, Basis basis) {
  if (basis == Basis::product) return product_ket;
  return model::default_model().to_e(product_ket);
}

DensityMatrix pure_state(const Ket& v) { return linalg::projector(v); }

double fidelity(const DensityMatrix& rho, const Ket& target) {
  if (rho.rows() != target.size()) {
    throw linalg::DimensionError("fidelity: rho is " + linalg::shape_string(rho) +
                                 ", target has dimension " + std::to_string(target.size()));
  }
  return target.dot(rho * target).real();
}

}  // namespace darkloop::dynamics
