#include "darkloop/pre_elimination.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace darkloop::dynamics {
namespace {

using linalg::max_abs;

const model::CollectiveModel& m() { return model::default_model(); }

TEST(PreEliminationModelTest, Validation) {
  EXPECT_NO_THROW((PreEliminationModel{3, 2.0, 1.0, 10.0}.validate()));
  EXPECT_THROW((PreEliminationModel{0, 2.0, 1.0, 10.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PreEliminationModel{3, 1.0, 1.0, 10.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PreEliminationModel{3, 1.0, -0.5, 10.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PreEliminationModel{3, 2.0, 1.0, 0.0}.validate()), std::invalid_argument);
}

TEST(PreEliminationModelTest, ReducedParameters) {
  const auto p = PreEliminationModel::from_reduced(0.5, 1.0, 10.0, 3);
  EXPECT_NEAR(p.squeeze(), 0.5, 1e-12);
  EXPECT_NEAR(p.gamma(), 1.0, 1e-12);
  EXPECT_NEAR(p.kappa / p.beta_r, 10.0, 1e-12);
  EXPECT_EQ(p.dim(), 64);
}

TEST(BuildPreEliminationTest, JaynesCummingsForm) {
  const PreEliminationModel p{2, 1.5, 0.0, 10.0};
  const OpenSystem sys = build_pre_elimination_model(p, 0.0);
  const ComplexMatrix c = cavity_annihilator(2);
  // beta_r (S+ c + S c^dagger), built term by term on the composite index.
  ComplexMatrix expected = ComplexMatrix::Zero(48, 48);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int n = 0; n < 3; ++n) {
        if (n >= 1) expected(i * 3 + n - 1, j * 3 + n) += 1.5 * m().s_plus(i, j) * std::sqrt(double(n));
        if (n <= 1) expected(i * 3 + n + 1, j * 3 + n) += 1.5 * m().s_minus(i, j) * std::sqrt(double(n + 1));
      }
  EXPECT_LE(max_abs(sys.hamiltonian - expected), 1e-14);
  ASSERT_EQ(sys.jumps.size(), 1u);
  EXPECT_LE(max_abs(sys.jumps[0] - std::sqrt(20.0) * c), 1e-14);
}

TEST(BuildPreEliminationTest, AnchorVacuumDecoupled) {
  const PreEliminationModel p{3, 2.0, 1.2, 10.0};
  const OpenSystem sys = build_pre_elimination_model(p, 0.8);
  // Row of <e1, vac| is zero: c|vac> = 0 and S|e1> = S+|e1> = 0.
  Ket bra = Ket::Zero(64);
  for (int i = 0; i < 16; ++i) bra(i * 4) = m().e_basis[0](i);
  EXPECT_LE((sys.hamiltonian.adjoint() * bra).norm(), 1e-15);
}

TEST(PartialTraceTest, RoundTrip) {
  const Ket psi = (m().e_basis[1] + m().e_basis[9]) / std::sqrt(2.0);
  const DensityMatrix rho = pure_state(psi);
  EXPECT_LE(max_abs(trace_out_cavity(embed_in_vacuum(rho, 3), 3) - rho), 0.0);
  EXPECT_THROW(trace_out_cavity(rho, 3), linalg::DimensionError);
}

TEST(EvolvePreEliminationTest, MatchesReducedModel) {
  const double r = 0.5, phi = 0.3, duration = 10.0;
  const auto p = PreEliminationModel::from_reduced(r, 1.0, 10.0, 3);
  const Ket psi =
      0.5 * (m().e_basis[0] + m().e_basis[1] + m().e_basis[2] + m().e_basis[9]);
  const DensityMatrix rho0 = pure_state(psi);

  const PreEliminationRun full = evolve_pre_elimination(p, phi, rho0, duration);
  ASSERT_TRUE(full.trajectory.ok()) << full.trajectory.failure_reason;
  const Trajectory reduced = evolve(rho0, Schedule::constant(r, phi, duration), 1.0);
  ASSERT_TRUE(reduced.ok());

  EXPECT_LE(linalg::trace_distance(full.reduced_final, reduced.final_state), 0.05);
  EXPECT_LT(full.mean_photon_number, 0.05);
  EXPECT_LE(full.trajectory.extrema().max_trace_deviation, 1e-8);
  // The reduced dynamics is not trivial over this window.
  EXPECT_GT(linalg::trace_distance(reduced.final_state, rho0), 0.1);
}

}  // namespace
}  // namespace darkloop::dynamics
