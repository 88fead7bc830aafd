#include "darkloop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace darkloop::linalg {

namespace {

std::string format_defect(double defect, double tol) {
  std::ostringstream os;
  os << "matrix is not Hermitian: max |H - H^dagger| = " << defect
     << " exceeds tolerance " << tol;
  return os.str();
}

}  // namespace

NotHermitianError::NotHermitianError(double defect, double tol)
    : std::domain_error(format_defect(defect, tol)), defect_(defect) {}

std::string shape_string(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a) + " by " +
                         shape_string(b));
  }
  ComplexMatrix out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

Ket apply(const ComplexMatrix& a, const Ket& v) {
  if (a.cols() != v.size()) {
    throw DimensionError("apply: cannot apply " + shape_string(a) +
                         " to a ket of dimension " + std::to_string(v.size()));
  }
  return a * v;
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix identity(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix outer(const Ket& a, const Ket& b) { return a * b.adjoint(); }

ComplexMatrix projector(const Ket& v) { return outer(v, v); }

Complex trace(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("trace: matrix is " + shape_string(m));
  }
  return m.trace();
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("hermiticity_defect: matrix is " + shape_string(m));
  }
  return max_abs(m - m.adjoint());
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h, double tol) {
  const double defect = hermiticity_defect(h);
  if (defect > tol) {
    throw NotHermitianError(defect, tol);
  }
  const Eigen::MatrixXcd sym = hermitian_part(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigen: eigensolver did not converge");
  }
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};

  for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
    for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
      const Complex c = out.vectors(i, k);
      if (std::abs(c) > 1e-12) {
        out.vectors.col(k) *= std::conj(c) / std::abs(c);
        break;
      }
    }
  }
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues();
}

std::vector<Ket> nullspace(const ComplexMatrix& m, double sv_tol) {
  if (!(sv_tol > 0.0)) {
    throw std::invalid_argument("nullspace: sv_tol must be positive");
  }
  const Eigen::MatrixXcd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = sv_tol * sigma_max;

  std::vector<Ket> basis;
  const Eigen::MatrixXcd& v = svd.matrixV();
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    // Columns past the number of singular values span the trivial kernel of
    // wide matrices.
    const bool null = k >= sigma.size() || sigma_max == 0.0 || sigma(k) < cutoff;
    if (null) {
      basis.emplace_back(v.col(k));
    }
  }
  return basis;
}

std::size_t intersection_dimension(const std::vector<Ket>& a,
                                   const std::vector<Ket>& b, double tol) {
  if (a.empty() || b.empty()) return 0;
  Eigen::MatrixXcd overlaps(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      overlaps(i, j) = a[i].dot(b[j]);
    }
  }
  // Principal-angle cosines equal to one mark shared directions.
  const RealVector cosines = Eigen::JacobiSVD<Eigen::MatrixXcd>(overlaps).singularValues();
  return static_cast<std::size_t>(
      std::count_if(cosines.begin(), cosines.end(),
                    [tol](double c) { return c > 1.0 - tol; }));
}

double min_eigenvalue(const ComplexMatrix& h) {
  const Eigen::MatrixXcd sym = hermitian_part(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace_distance: " + shape_string(a) + " vs " +
                         shape_string(b));
  }
  const Eigen::MatrixXcd diff = hermitian_part(a - b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace darkloop::linalg
