// model.hpp - collective two-pair model: 16-dim product space of two cavity
// pairs, collective raising/lowering operators, the 12-state symmetric basis
// |e1>..|e12>, squeezed-reservoir jump operators and their dark states.

#pragma once

#include "darkloop/linalg.hpp"

#include <array>
#include <cstddef>

namespace darkloop::model {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Ket;

// Collective states of one cavity pair. Qubit n lives on {singlet, minus}.
enum class PairState : int { singlet = 0, minus = 1, zero = 2, plus = 3 };

inline constexpr int kPairDim = 4;
inline constexpr int kDim = 16;
inline constexpr int kEDim = 12;
inline constexpr int kDfsDim = 4;

// (p1, p2) -> 4 * idx(p1) + idx(p2)
constexpr int product_index(PairState p1, PairState p2) {
  return kPairDim * static_cast<int>(p1) + static_cast<int>(p2);
}

// e-basis indices (0-based) of the computational states e1, e2, e3, e10.
inline constexpr std::array<int, 4> kComputationalE{0, 1, 2, 9};

struct ReservoirParams {
  double r = 0.0;      // squeeze parameter
  double phi = 0.0;    // squeeze phase, unwrapped
  double gamma = 1.0;  // collective decay rate

  void validate() const;
};

struct CollectiveModel {
  ComplexMatrix s_plus;   // S+ = S+_1 + S+_2
  ComplexMatrix s_minus;  // S  = (S+)^dagger
  std::array<ComplexMatrix, 2> pair_s_plus;   // S+_n embedded in 16 dims
  std::array<ComplexMatrix, 2> pair_s_minus;
  std::array<Ket, kEDim> e_basis;
  ComplexMatrix e_isometry;  // 16x12, column j is |e_{j+1}>
  ComplexMatrix projector_e;
  ComplexMatrix projector_computational;

  // 16-dim ket -> coordinates in the e-basis (12 entries).
  Ket to_e(const Ket& v) const;
  // e-basis coordinates -> 16-dim ket.
  Ket from_e(const Ket& c) const;
  // 16x16 operator restricted to span{e} (12x12).
  ComplexMatrix restrict_to_e(const ComplexMatrix& op) const;
};

CollectiveModel build_model();

// Shared immutable instance.
const CollectiveModel& default_model();

// R = S cosh r + e^{i phi} S+ sinh r
ComplexMatrix jump_operator(const CollectiveModel& model, double r, double phi);
// R_n = S_n cosh r + e^{i phi} S+_n sinh r for n = 1, 2.
std::array<ComplexMatrix, 2> pair_jump_operators(const CollectiveModel& model,
                                                 double r, double phi);

// Coefficients of dark state j (1..4) in the e-basis, and their analytic
// partial derivatives.
Ket dfs_coefficients(int j, double r, double phi);
Ket dfs_coefficients_dr(int j, double r, double phi);
Ket dfs_coefficients_dphi(int j, double r, double phi);

// Normalized dark state j (1..4) in the 16-dim product space.
Ket dfs_state(const CollectiveModel& model, int j, double r, double phi);

double nu1(double r0);
double nu12(double r0);
// Squeeze parameter at which |nu12| = |nu1|.
double cz_point();

// 12x12 unitary whose rows are e-basis coordinates of the adiabatic frame:
// rows 0..3 are the dark states, rows 4..11 a Gram-Schmidt completion over
// e1..e12 in index order.
ComplexMatrix frame_unitary(const CollectiveModel& model, double r, double phi);

// G = i W^dagger dW/dt with W = O^T (columns are frame states). Frame
// indices 0..3 form the dark block. With this convention dark-state
// coordinates obey dv/dt = i G v, and G[1][1] = -nu1 * phidot at rdot = 0.
ComplexMatrix gauge_generator(const CollectiveModel& model, double r, double phi,
                              double rdot, double phidot);

// Dark 4x4 block of the gauge generator, analytic.
ComplexMatrix dark_gauge_block(double r, double phi, double rdot, double phidot);

// A_j(r) = Im <psi_j | d/dphi psi_j>. Closed-loop phase is chi_j = -A_j phi0;
// A_1 = 0, A_2 = A_3 = nu1, A_4 = nu12.
double berry_connection_phi(const CollectiveModel& model, int j, double r);

}  // namespace darkloop::model
