#include "darkloop/pre_elimination.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace darkloop::dynamics {

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix fock_annihilator(int n_max) {
  ComplexMatrix a = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

SparseOperator sparse_of(const ComplexMatrix& m) {
  SparseOperator s = m.sparseView();
  s.makeCompressed();
  return s;
}

}  // namespace

void PreEliminationModel::validate() const {
  if (n_max < 1) throw std::invalid_argument("PreEliminationModel: n_max must be >= 1");
  if (!(beta_s >= 0.0) || !(beta_r > beta_s)) {
    throw std::invalid_argument("PreEliminationModel: need beta_r > beta_s >= 0");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("PreEliminationModel: kappa must be > 0");
}

double PreEliminationModel::squeeze() const {
  return std::acosh(beta_r / std::sqrt(beta_r * beta_r - beta_s * beta_s));
}

double PreEliminationModel::gamma() const {
  return 2.0 * (beta_r * beta_r - beta_s * beta_s) / kappa;
}

PreEliminationModel PreEliminationModel::from_reduced(double r, double gamma,
                                                      double kappa_over_beta_r,
                                                      int n_max) {
  if (!(r >= 0.0) || !(gamma > 0.0) || !(kappa_over_beta_r > 0.0)) {
    throw std::invalid_argument("from_reduced: need r >= 0, Gamma > 0, kappa/beta_r > 0");
  }
  // beta_r^2 = cosh^2 r * Gamma * kappa / 2 with kappa = ratio * beta_r.
  PreEliminationModel p;
  p.n_max = n_max;
  p.beta_r = std::cosh(r) * std::cosh(r) * gamma * kappa_over_beta_r / 2.0;
  p.beta_s = p.beta_r * std::tanh(r);
  p.kappa = kappa_over_beta_r * p.beta_r;
  p.validate();
  return p;
}

ComplexMatrix cavity_annihilator(int n_max) {
  return kron(linalg::identity(model::kDim), fock_annihilator(n_max));
}

OpenSystem build_pre_elimination_model(const PreEliminationModel& params, double phi) {
  params.validate();
  const auto& m = model::default_model();
  const ComplexMatrix atomic = (std::polar(1.0, phi) * params.beta_r) * m.s_plus +
                               params.beta_s * m.s_minus;
  const ComplexMatrix coupling = kron(atomic, fock_annihilator(params.n_max));
  OpenSystem sys;
  sys.hamiltonian = coupling + coupling.adjoint();
  sys.jumps.push_back(std::sqrt(2.0 * params.kappa) * cavity_annihilator(params.n_max));
  return sys;
}

DensityMatrix embed_in_vacuum(const DensityMatrix& rho_atoms, int n_max) {
  ComplexMatrix vacuum = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  vacuum(0, 0) = 1.0;
  return kron(rho_atoms, vacuum);
}

DensityMatrix trace_out_cavity(const DensityMatrix& rho, int n_max) {
  const int f = n_max + 1;
  if (rho.rows() != model::kDim * f || rho.cols() != rho.rows()) {
    throw linalg::DimensionError("trace_out_cavity: rho is " + linalg::shape_string(rho));
  }
  DensityMatrix out = DensityMatrix::Zero(model::kDim, model::kDim);
  for (int i = 0; i < model::kDim; ++i)
    for (int j = 0; j < model::kDim; ++j)
      for (int n = 0; n < f; ++n) out(i, j) += rho(i * f + n, j * f + n);
  return out;
}

PreEliminationRun evolve_pre_elimination(const PreEliminationModel& params, double phi,
                                         const DensityMatrix& rho_atoms, double duration,
                                         EvolveOptions options) {
  params.validate();
  if (rho_atoms.rows() != model::kDim || rho_atoms.cols() != model::kDim) {
    throw linalg::DimensionError("evolve_pre_elimination: rho_atoms is " +
                                 linalg::shape_string(rho_atoms));
  }
  const OpenSystem sys = build_pre_elimination_model(params, phi);
  SparseGenerator generator;
  generator.hamiltonian = sparse_of(sys.hamiltonian);
  for (const auto& jump : sys.jumps) {
    generator.jumps.push_back(sparse_of(jump));
    generator.rates.push_back(1.0);
  }
  const GeneratorFactory factory = [&generator](const ControlPoint&) { return generator; };

  // Fastest Liouvillian rate is about 2 kappa n_max; keep RK4 well inside
  // its stability region.
  options.dt = std::min(options.dt, 0.25 / (2.0 * params.kappa * params.n_max));
  options.basis = Basis::product;
  options.target = nullptr;

  const Schedule schedule = Schedule::constant(params.squeeze(), phi, duration);
  PreEliminationRun run;
  run.trajectory =
      integrate(embed_in_vacuum(rho_atoms, params.n_max), schedule, factory, options);
  run.reduced_final = trace_out_cavity(run.trajectory.final_state, params.n_max);
  const ComplexMatrix c = cavity_annihilator(params.n_max);
  run.mean_photon_number =
      (c.adjoint() * c * run.trajectory.final_state).trace().real();
  return run;
}

}  // namespace darkloop::dynamics
