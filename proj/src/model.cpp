#include "darkloop/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace darkloop::model {

namespace {

constexpr double kCompletionResidualTol = 1e-3;
constexpr double kFiniteDiffStep = 1e-6;

Ket product_ket(PairState p1, PairState p2) {
  Ket v = Ket::Zero(kDim);
  v(product_index(p1, p2)) = 1.0;
  return v;
}

Ket e_unit(int k) {
  Ket v = Ket::Zero(kEDim);
  v(k) = 1.0;
  return v;
}

// Single-pair S+ = |0><-1| + |1><0|; identity on the singlet.
Eigen::Matrix4cd single_pair_raise() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(static_cast<int>(PairState::zero), static_cast<int>(PairState::minus)) = 1.0;
  m(static_cast<int>(PairState::plus), static_cast<int>(PairState::zero)) = 1.0;
  return m;
}

ComplexMatrix kron4(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
  ComplexMatrix out(kDim, kDim);
  for (int i = 0; i < kPairDim; ++i)
    for (int j = 0; j < kPairDim; ++j)
      for (int k = 0; k < kPairDim; ++k)
        for (int l = 0; l < kPairDim; ++l)
          out(kPairDim * i + k, kPairDim * j + l) = a(i, j) * b(k, l);
  return out;
}

void check_dfs_index(int j) {
  if (j < 1 || j > kDfsDim) {
    throw std::invalid_argument("dark state index must be in 1..4, got " +
                                std::to_string(j));
  }
}

void check_squeeze(double r) {
  if (!(r >= 0.0)) {
    throw std::invalid_argument("squeeze parameter r must be >= 0, got " +
                                std::to_string(r));
  }
}

// Coefficient functions of dark state 4 in tanh r and their t-derivatives:
// e8: e^{2i phi} t^2, e12: -sqrt(2/3) e^{i phi} t, e10: 1; all over N(t).
struct QuadrupleDark {
  double norm;        // N
  double dnorm_dt;    // dN/dt
};

QuadrupleDark quadruple_norm(double t) {
  const double n2 = t * t * t * t + (2.0 / 3.0) * t * t + 1.0;
  const double n = std::sqrt(n2);
  return {n, (2.0 * t * t * t + (2.0 / 3.0) * t) / n};
}

// Columns are the frame states in e-coordinates.
ComplexMatrix frame_columns(double r, double phi) {
  ComplexMatrix w(kEDim, kEDim);
  int filled = 0;
  for (int j = 1; j <= kDfsDim; ++j) {
    w.col(filled++) = dfs_coefficients(j, r, phi);
  }
  for (int k = 0; k < kEDim && filled < kEDim; ++k) {
    Ket v = e_unit(k);
    // Two passes of classical Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < filled; ++c) {
        v -= w.col(c).dot(v) * w.col(c);
      }
    }
    const double residual = v.norm();
    if (residual < kCompletionResidualTol) continue;
    w.col(filled++) = v / residual;
  }
  if (filled != kEDim) {
    throw std::runtime_error("frame completion failed at r = " + std::to_string(r) +
                             ": only " + std::to_string(filled) + " of 12 vectors");
  }
  return w;
}

}  // namespace

void ReservoirParams::validate() const {
  if (!(r >= 0.0)) throw std::invalid_argument("ReservoirParams: r must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("ReservoirParams: Gamma must be > 0");
  if (!std::isfinite(phi)) throw std::invalid_argument("ReservoirParams: phi must be finite");
}

Ket CollectiveModel::to_e(const Ket& v) const {
  return e_isometry.adjoint() * v;
}

Ket CollectiveModel::from_e(const Ket& c) const { return e_isometry * c; }

ComplexMatrix CollectiveModel::restrict_to_e(const ComplexMatrix& op) const {
  return e_isometry.adjoint() * op * e_isometry;
}

CollectiveModel build_model() {
  using P = PairState;
  CollectiveModel m;
  const Eigen::Matrix4cd raise = single_pair_raise();
  const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();

  m.pair_s_plus[0] = kron4(raise, id);
  m.pair_s_plus[1] = kron4(id, raise);
  m.pair_s_minus[0] = m.pair_s_plus[0].adjoint();
  m.pair_s_minus[1] = m.pair_s_plus[1].adjoint();
  m.s_plus = m.pair_s_plus[0] + m.pair_s_plus[1];
  m.s_minus = m.s_plus.adjoint();

  const double s2 = std::sqrt(2.0);
  const double s6 = std::sqrt(6.0);
  m.e_basis = {
      product_ket(P::singlet, P::singlet),                                // e1
      product_ket(P::singlet, P::minus),                                  // e2
      product_ket(P::minus, P::singlet),                                  // e3
      product_ket(P::singlet, P::zero),                                   // e4
      product_ket(P::zero, P::singlet),                                   // e5
      product_ket(P::singlet, P::plus),                                   // e6
      product_ket(P::plus, P::singlet),                                   // e7
      product_ket(P::plus, P::plus),                                      // e8
      Ket((product_ket(P::plus, P::zero) + product_ket(P::zero, P::plus)) / s2),
      product_ket(P::minus, P::minus),                                    // e10
      Ket((product_ket(P::zero, P::minus) + product_ket(P::minus, P::zero)) / s2),
      Ket((product_ket(P::plus, P::minus) + product_ket(P::minus, P::plus) +
           2.0 * product_ket(P::zero, P::zero)) / s6),
  };

  m.e_isometry.resize(kDim, kEDim);
  for (int j = 0; j < kEDim; ++j) m.e_isometry.col(j) = m.e_basis[j];
  m.projector_e = m.e_isometry * m.e_isometry.adjoint();
  m.projector_computational = ComplexMatrix::Zero(kDim, kDim);
  for (int j : kComputationalE) m.projector_computational += linalg::projector(m.e_basis[j]);
  return m;
}

const CollectiveModel& default_model() {
  static const CollectiveModel model = build_model();
  return model;
}

ComplexMatrix jump_operator(const CollectiveModel& model, double r, double phi) {
  check_squeeze(r);
  return std::cosh(r) * model.s_minus +
         (std::polar(1.0, phi) * std::sinh(r)) * model.s_plus;
}

std::array<ComplexMatrix, 2> pair_jump_operators(const CollectiveModel& model,
                                                 double r, double phi) {
  check_squeeze(r);
  const Complex squeeze = std::polar(1.0, phi) * std::sinh(r);
  return {std::cosh(r) * model.pair_s_minus[0] + squeeze * model.pair_s_plus[0],
          std::cosh(r) * model.pair_s_minus[1] + squeeze * model.pair_s_plus[1]};
}

Ket dfs_coefficients(int j, double r, double phi) {
  check_dfs_index(j);
  Ket c = Ket::Zero(kEDim);
  if (j == 1) {
    c(0) = 1.0;
    return c;
  }
  const Complex e1phi = std::polar(1.0, phi);
  if (j <= 3) {
    const double root = std::sqrt(std::cosh(2.0 * r));
    c(j - 1) = std::cosh(r) / root;
    c(j + 3) = -e1phi * (std::sinh(r) / root);
    return c;
  }
  const double t = std::tanh(r);
  const double n = quadruple_norm(t).norm;
  c(7) = e1phi * e1phi * (t * t / n);
  c(11) = -e1phi * (std::sqrt(2.0 / 3.0) * t / n);
  c(9) = 1.0 / n;
  return c;
}

Ket dfs_coefficients_dr(int j, double r, double phi) {
  check_dfs_index(j);
  Ket d = Ket::Zero(kEDim);
  if (j == 1) return d;
  const Complex e1phi = std::polar(1.0, phi);
  if (j <= 3) {
    const double c2 = std::cosh(2.0 * r);
    const double s2 = std::sinh(2.0 * r);
    const double denom = c2 * std::sqrt(c2);
    d(j - 1) = (std::sinh(r) * c2 - std::cosh(r) * s2) / denom;
    d(j + 3) = -e1phi * ((std::cosh(r) * c2 - std::sinh(r) * s2) / denom);
    return d;
  }
  const double t = std::tanh(r);
  const double dt_dr = 1.0 - t * t;
  const auto [n, dn] = quadruple_norm(t);
  const auto quotient = [n = n, dn = dn](double f, double df) {
    return (df * n - f * dn) / (n * n);
  };
  d(7) = e1phi * e1phi * (quotient(t * t, 2.0 * t) * dt_dr);
  d(11) = -e1phi * (std::sqrt(2.0 / 3.0) * quotient(t, 1.0) * dt_dr);
  d(9) = quotient(1.0, 0.0) * dt_dr;
  return d;
}

Ket dfs_coefficients_dphi(int j, double r, double phi) {
  check_dfs_index(j);
  Ket d = dfs_coefficients(j, r, phi);
  // The e8 amplitude carries e^{2i phi}, the e6/e7/e12 amplitudes e^{i phi}.
  for (int k = 0; k < kEDim; ++k) {
    const int winding = (k == 7) ? 2 : (k == 5 || k == 6 || k == 11) ? 1 : 0;
    d(k) *= linalg::kI * static_cast<double>(winding);
  }
  return d;
}

Ket dfs_state(const CollectiveModel& model, int j, double r, double phi) {
  check_squeeze(r);
  return model.from_e(dfs_coefficients(j, r, phi));
}

double nu1(double r0) {
  const double s = std::sinh(r0);
  const double c = std::cosh(r0);
  return s * s / (s * s + c * c);
}

double nu12(double r0) {
  const double t2 = std::tanh(r0) * std::tanh(r0);
  return (2.0 * t2 * t2 + (2.0 / 3.0) * t2) / (t2 * t2 + (2.0 / 3.0) * t2 + 1.0);
}

double cz_point() { return std::atanh(std::sqrt(std::sqrt(4.0 / 3.0) - 1.0)); }

ComplexMatrix frame_unitary(const CollectiveModel& /*model*/, double r, double phi) {
  check_squeeze(r);
  return frame_columns(r, phi).transpose();
}

ComplexMatrix dark_gauge_block(double r, double phi, double rdot, double phidot) {
  ComplexMatrix g(kDfsDim, kDfsDim);
  std::array<Ket, kDfsDim> states;
  std::array<Ket, kDfsDim> rates;
  for (int j = 1; j <= kDfsDim; ++j) {
    states[j - 1] = dfs_coefficients(j, r, phi);
    rates[j - 1] = rdot * dfs_coefficients_dr(j, r, phi) +
                   phidot * dfs_coefficients_dphi(j, r, phi);
  }
  for (int a = 0; a < kDfsDim; ++a)
    for (int b = 0; b < kDfsDim; ++b) g(a, b) = linalg::kI * states[a].dot(rates[b]);
  return g;
}

ComplexMatrix gauge_generator(const CollectiveModel& /*model*/, double r, double phi,
                              double rdot, double phidot) {
  check_squeeze(r);
  const ComplexMatrix w = frame_columns(r, phi);
  ComplexMatrix dw = ComplexMatrix::Zero(kEDim, kEDim);
  for (int j = 1; j <= kDfsDim; ++j) {
    dw.col(j - 1) = rdot * dfs_coefficients_dr(j, r, phi) +
                    phidot * dfs_coefficients_dphi(j, r, phi);
  }

  const double h = kFiniteDiffStep;
  if (rdot != 0.0) {
    // Forward difference when a central stencil would leave r >= 0.
    const double lo = r >= h ? r - h : r;
    const ComplexMatrix d = (frame_columns(r + h, phi) - frame_columns(lo, phi)) /
                            (r + h - lo);
    dw.rightCols(kEDim - kDfsDim) += rdot * d.rightCols(kEDim - kDfsDim);
  }
  if (phidot != 0.0) {
    const ComplexMatrix d =
        (frame_columns(r, phi + h) - frame_columns(r, phi - h)) / (2.0 * h);
    dw.rightCols(kEDim - kDfsDim) += phidot * d.rightCols(kEDim - kDfsDim);
  }
  return linalg::kI * (w.adjoint() * dw);
}

double berry_connection_phi(const CollectiveModel& /*model*/, int j, double r) {
  check_squeeze(r);
  const Ket c = dfs_coefficients(j, r, 0.0);
  return c.dot(dfs_coefficients_dphi(j, r, 0.0)).imag();
}

}  // namespace darkloop::model
