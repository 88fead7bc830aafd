// linalg.hpp - dense complex linear algebra for small (<= 64-dim) operators.
//
// Everything here is a pure function of its arguments. Matrices are stored
// row-major, kets are column vectors.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace darkloop::linalg {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

inline constexpr double kHermiticityTol = 1e-9;
inline constexpr double kNullspaceTol = 1e-9;

// Shapes of the operands do not fit the requested operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input to a Hermitian routine is not Hermitian within tolerance.
class NotHermitianError : public std::domain_error {
 public:
  NotHermitianError(double defect, double tol);
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

std::string shape_string(const ComplexMatrix& m);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
Ket apply(const ComplexMatrix& a, const Ket& v);
ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix outer(const Ket& a, const Ket& b);  // |a><b|
ComplexMatrix projector(const Ket& v);            // |v><v|

Complex trace(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
// max |M - M^dagger| over entries.
double hermiticity_defect(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors; // column k pairs with values[k]
};

// Eigendecomposition of a Hermitian matrix. Each eigenvector's first
// component with magnitude above 1e-12 is rotated to be real-positive, so
// output is reproducible.
HermitianEigen hermitian_eigen(const ComplexMatrix& h,
                               double tol = kHermiticityTol);

RealVector singular_values(const ComplexMatrix& m);

// Orthonormal basis of the right null space: right singular vectors with
// sigma < sv_tol * sigma_max. Empty when the matrix has full column rank.
std::vector<Ket> nullspace(const ComplexMatrix& m, double sv_tol = kNullspaceTol);

// Dimension of span(a) intersected with span(b); both lists orthonormal.
std::size_t intersection_dimension(const std::vector<Ket>& a,
                                   const std::vector<Ket>& b,
                                   double tol = 1e-8);

double min_eigenvalue(const ComplexMatrix& h);
// 1/2 * sum |lambda_k(a - b)| for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace darkloop::linalg
