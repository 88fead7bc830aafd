#include "darkloop/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace darkloop::model {
namespace {

using linalg::max_abs;

// Closed forms evaluated with 40-digit arithmetic.
constexpr double kNu1At05 = 0.1759728631680573002;
constexpr double kNu12At05 = 0.1966184155097374389;
constexpr double kNu1At03 = 0.07822465618909667;
constexpr double kNu12At03 = 0.06672340443933076;
constexpr double kCzPoint = 0.4157214727646552689;
constexpr double kNuAtCzPoint = 0.1339745962155613532;

const CollectiveModel& m() { return default_model(); }

Ket basis_ket(int index) {
  Ket v = Ket::Zero(kDim);
  v(index) = 1.0;
  return v;
}

// Im <psi| d/dphi psi> by central differences.
double berry_fd(int j, double r) {
  const double h = 1e-5;
  const Ket plus = dfs_state(m(), j, r, 0.4 + h);
  const Ket minus = dfs_state(m(), j, r, 0.4 - h);
  const Ket mid = dfs_state(m(), j, r, 0.4);
  return mid.dot((plus - minus) / (2 * h)).imag();
}

TEST(BuildModelTest, OperatorsAreAdjoint) {
  EXPECT_EQ(m().s_minus, m().s_plus.adjoint());
  for (int n = 0; n < 2; ++n) EXPECT_EQ(m().pair_s_minus[n], m().pair_s_plus[n].adjoint());
  EXPECT_LE(max_abs(m().s_plus - m().pair_s_plus[0] - m().pair_s_plus[1]), 0.0);
}

TEST(BuildModelTest, ProductIndexConvention) {
  EXPECT_EQ(product_index(PairState::singlet, PairState::singlet), 0);
  EXPECT_EQ(product_index(PairState::minus, PairState::zero), 6);
  EXPECT_EQ(product_index(PairState::plus, PairState::plus), 15);
  // S+ on pair 2 moves |a,-1> to |a,0>.
  const Ket v = m().pair_s_plus[1] * basis_ket(product_index(PairState::singlet, PairState::minus));
  EXPECT_LE((v - basis_ket(product_index(PairState::singlet, PairState::zero))).norm(), 0.0);
}

TEST(BuildModelTest, LowestStateAnnihilated) {
  EXPECT_LE((m().s_minus * m().e_basis[9]).norm(), 1e-15);
}

TEST(BuildModelTest, RaisingE10) {
  const Ket v = m().s_plus * m().e_basis[9];
  EXPECT_LE((v - std::sqrt(2.0) * m().e_basis[10]).norm(), 1e-14);
}

TEST(BuildModelTest, EBasisOrthonormal) {
  EXPECT_NEAR(m().e_basis[11].norm(), 1.0, 1e-15);
  const ComplexMatrix gram = m().e_isometry.adjoint() * m().e_isometry;
  EXPECT_LE(max_abs(gram - linalg::identity(kEDim)), 1e-12);
}

TEST(BuildModelTest, E12Coefficients) {
  const Ket& e12 = m().e_basis[11];
  EXPECT_NEAR(e12(product_index(PairState::plus, PairState::minus)).real(), 1 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(e12(product_index(PairState::minus, PairState::plus)).real(), 1 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(e12(product_index(PairState::zero, PairState::zero)).real(), 2 / std::sqrt(6.0), 1e-15);
}

TEST(BuildModelTest, CollectiveOperatorsPreserveESpan) {
  const ComplexMatrix out = linalg::identity(kDim) - m().projector_e;
  EXPECT_LE(max_abs(out * m().s_plus * m().projector_e), 1e-12);
  EXPECT_LE(max_abs(out * m().s_minus * m().projector_e), 1e-12);
}

TEST(BuildModelTest, BasisMapsRoundTrip) {
  const Ket v = m().e_basis[4] + Complex(0, 2) * m().e_basis[7];
  const Ket c = m().to_e(v);
  EXPECT_NEAR(std::abs(c(4) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c(7) - Complex(0, 2)), 0.0, 1e-15);
  EXPECT_LE((m().from_e(c) - v).norm(), 1e-15);
}

TEST(JumpOperatorTest, ZeroSqueezeIsLowering) {
  EXPECT_EQ(jump_operator(m(), 0.0, 1.3), m().s_minus);
}

TEST(JumpOperatorTest, AnnihilatesDarkStates) {
  for (int j = 1; j <= 4; ++j) {
    const Ket psi = dfs_state(m(), j, 0.5, 0.3);
    EXPECT_LE((jump_operator(m(), 0.5, 0.3) * psi).norm(), 1e-12) << "j = " << j;
  }
}

TEST(JumpOperatorTest, KernelPropertyRandom) {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> r_dist(0.0, 0.9);
  std::uniform_real_distribution<double> phi_dist(0.0, 2 * std::numbers::pi);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = r_dist(gen);
    const double phi = phi_dist(gen);
    const ComplexMatrix jump = jump_operator(m(), r, phi);
    for (int j = 1; j <= 4; ++j) worst = std::max(worst, (jump * dfs_state(m(), j, r, phi)).norm());
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(JumpOperatorTest, ClosedOnESpan) {
  const ComplexMatrix out = linalg::identity(kDim) - m().projector_e;
  for (double r : {0.1, 0.5, 0.9})
    EXPECT_LE(max_abs(out * jump_operator(m(), r, 0.7) * m().projector_e), 1e-12);
}

TEST(JumpOperatorTest, KernelDimensions) {
  std::vector<Ket> e_span(m().e_basis.begin(), m().e_basis.end());
  for (double r : {0.1, 0.4, 0.8}) {
    const auto kernel = linalg::nullspace(jump_operator(m(), r, 1.1));
    EXPECT_EQ(kernel.size(), 6u) << "r = " << r;
    EXPECT_EQ(linalg::intersection_dimension(kernel, e_span), 4u) << "r = " << r;
    std::vector<Ket> dark;
    for (int j = 1; j <= 4; ++j) dark.push_back(dfs_state(m(), j, r, 1.1));
    EXPECT_EQ(linalg::intersection_dimension(kernel, dark), 4u) << "r = " << r;
  }
}

TEST(DfsStateTest, ZeroSqueezeLimits) {
  EXPECT_LE((dfs_state(m(), 2, 0.0, 2.1) - m().e_basis[1]).norm(), 1e-15);
  EXPECT_LE((dfs_state(m(), 4, 0.0, 0.0) - m().e_basis[9]).norm(), 1e-15);
  EXPECT_LE((dfs_state(m(), 1, 0.7, 0.2) - m().e_basis[0]).norm(), 1e-15);
}

TEST(DfsStateTest, Normalized) {
  const Ket psi = dfs_state(m(), 3, 0.5, 1.0);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  EXPECT_LE((jump_operator(m(), 0.5, 1.0) * psi).norm(), 1e-12);
}

TEST(DfsStateTest, RejectsBadIndex) {
  EXPECT_THROW(dfs_state(m(), 0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(dfs_state(m(), 5, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(dfs_state(m(), 2, -0.1, 0.0), std::invalid_argument);
}

TEST(DfsStateTest, AnalyticDerivatives) {
  const double h = 1e-6;
  for (int j = 1; j <= 4; ++j) {
    const Ket dr = (dfs_coefficients(j, 0.6 + h, 0.9) - dfs_coefficients(j, 0.6 - h, 0.9)) / (2 * h);
    const Ket dphi = (dfs_coefficients(j, 0.6, 0.9 + h) - dfs_coefficients(j, 0.6, 0.9 - h)) / (2 * h);
    EXPECT_LE((dfs_coefficients_dr(j, 0.6, 0.9) - dr).norm(), 1e-8) << "j = " << j;
    EXPECT_LE((dfs_coefficients_dphi(j, 0.6, 0.9) - dphi).norm(), 1e-8) << "j = " << j;
  }
}

TEST(NuTest, ZeroSqueeze) {
  EXPECT_EQ(nu1(0.0), 0.0);
  EXPECT_EQ(nu12(0.0), 0.0);
}

TEST(NuTest, FrozenValues) {
  EXPECT_NEAR(nu1(0.5), kNu1At05, 1e-15);
  EXPECT_NEAR(nu12(0.5), kNu12At05, 1e-15);
  EXPECT_NEAR(nu1(0.3), kNu1At03, 1e-15);
  EXPECT_NEAR(nu12(0.3), kNu12At03, 1e-15);
}

TEST(NuTest, GatePhaseDenominatorPositive) {
  for (int k = 1; k < 900; ++k) {
    const double r = 0.001 * k;
    EXPECT_GT(2 * nu1(r) - nu12(r), 0.0) << "r = " << r;
  }
}

TEST(CzPointTest, Value) {
  EXPECT_NEAR(cz_point(), 0.4157, 1e-4);
  EXPECT_NEAR(cz_point(), kCzPoint, 1e-15);
}

TEST(CzPointTest, EqualConnections) {
  const double r = cz_point();
  EXPECT_NEAR(nu1(r) - nu12(r), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(nu12(r)), std::abs(nu1(r)), 1e-10);
  EXPECT_NEAR(nu1(r), kNuAtCzPoint, 1e-15);
  // Positive root of t^2 + 2t - 1/3 = 0 with t = tanh^2 r.
  const double root = (-2.0 + std::sqrt(4.0 + 4.0 / 3.0)) / 2.0;
  EXPECT_NEAR(std::pow(std::tanh(r), 2), root, 1e-12);
  EXPECT_NEAR(std::pow(std::tanh(r), 2), std::sqrt(4.0 / 3.0) - 1.0, 1e-12);
}

TEST(FrameUnitaryTest, ZeroSqueeze) {
  const ComplexMatrix o = frame_unitary(m(), 0.0, 0.0);
  const int dark[4] = {0, 1, 2, 9};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < kEDim; ++j)
      EXPECT_NEAR(std::abs(o(i, j)), j == dark[i] ? 1.0 : 0.0, 1e-14);
  }
  // Every row has exactly one nonzero entry.
  for (int i = 0; i < kEDim; ++i) {
    int nonzero = 0;
    for (int j = 0; j < kEDim; ++j) nonzero += std::abs(o(i, j)) > 1e-12;
    EXPECT_EQ(nonzero, 1) << "row " << i;
  }
}

TEST(FrameUnitaryTest, Unitary) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  std::uniform_real_distribution<double> phi_dist(0.0, 2 * std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix o = frame_unitary(m(), r_dist(gen), phi_dist(gen));
    EXPECT_LE(max_abs(o * o.adjoint() - linalg::identity(kEDim)), 1e-10);
  }
}

TEST(FrameUnitaryTest, DarkRows) {
  const ComplexMatrix o = frame_unitary(m(), 0.5, 0.7);
  for (int j = 1; j <= 4; ++j) {
    const Ket row = o.row(j - 1).transpose();
    EXPECT_LE((row - dfs_coefficients(j, 0.5, 0.7)).norm(), 1e-14) << "j = " << j;
  }
}

TEST(GaugeGeneratorTest, StaticIsZero) {
  EXPECT_LE(max_abs(gauge_generator(m(), 0.5, 0.3, 0.0, 0.0)), 0.0);
}

TEST(GaugeGeneratorTest, Hermitian) {
  std::mt19937 gen(6);
  std::uniform_real_distribution<double> r_dist(0.0, 0.8);
  std::uniform_real_distribution<double> phi_dist(0.0, 2 * std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix g = gauge_generator(m(), r_dist(gen), phi_dist(gen), 0.7, -1.3);
    EXPECT_LE(linalg::hermiticity_defect(g), 1e-6);
  }
}

TEST(GaugeGeneratorTest, DarkDiagonal) {
  const ComplexMatrix g = gauge_generator(m(), 0.5, 0.0, 0.0, 1.0);
  EXPECT_NEAR(g(0, 0).real(), 0.0, 1e-12);
  EXPECT_NEAR(g(1, 1).real(), -kNu1At05, 1e-10);
  EXPECT_NEAR(g(2, 2).real(), -kNu1At05, 1e-10);
  EXPECT_NEAR(g(3, 3).real(), -kNu12At05, 1e-10);
}

TEST(GaugeGeneratorTest, DarkBlockMatchesAnalytic) {
  const ComplexMatrix g = gauge_generator(m(), 0.35, 1.2, 0.4, 0.9);
  const ComplexMatrix block = dark_gauge_block(0.35, 1.2, 0.4, 0.9);
  EXPECT_LE(max_abs(g.topLeftCorner(kDfsDim, kDfsDim) - block), 1e-8);
  // The holonomy is abelian: no off-diagonal coupling inside the dark block.
  for (int i = 0; i < kDfsDim; ++i)
    for (int j = 0; j < kDfsDim; ++j)
      if (i != j) EXPECT_LE(std::abs(block(i, j)), 1e-14);
}

TEST(BerryConnectionTest, AnchorIsFlat) {
  for (double r : {0.0, 0.3, 0.8}) EXPECT_EQ(berry_connection_phi(m(), 1, r), 0.0);
}

TEST(BerryConnectionTest, MatchesFiniteDifferences) {
  EXPECT_NEAR(berry_connection_phi(m(), 2, 0.5), kNu1At05, 1e-12);
  for (int k = 1; k <= 8; ++k) {
    const double r = 0.1 * k;
    EXPECT_NEAR(berry_fd(2, r), nu1(r), 1e-8) << "r = " << r;
    EXPECT_NEAR(berry_fd(3, r), nu1(r), 1e-8) << "r = " << r;
    EXPECT_NEAR(berry_fd(4, r), nu12(r), 1e-8) << "r = " << r;
    EXPECT_NEAR(berry_connection_phi(m(), 4, r), berry_fd(4, r), 1e-8) << "r = " << r;
  }
}

TEST(BerryConnectionTest, EqualAtCzPoint) {
  const double r = cz_point();
  EXPECT_NEAR(berry_connection_phi(m(), 4, r), berry_connection_phi(m(), 2, r), 1e-10);
}

TEST(ReservoirParamsTest, Validation) {
  EXPECT_NO_THROW((ReservoirParams{0.5, 20.0, 1.0}.validate()));
  EXPECT_THROW((ReservoirParams{-0.1, 0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ReservoirParams{0.1, 0.0, 0.0}.validate()), std::invalid_argument);
}

}  // namespace
}  // namespace darkloop::model
