#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace subres::linalg {

using cplx = std::complex<double>;
using ApplyFn = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Largest singular value by Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization. `apply` and `apply_adjoint` realize A and A^H.
double largest_singular_value(const ApplyFn& apply, const ApplyFn& apply_adjoint, Eigen::Index n);
double largest_singular_value(const Eigen::MatrixXcd& a);

// ||A^{-1}|| = 1 / sigma_min(A) from an existing LU factorization.
double inverse_norm(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu);

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// Full decomposition (LAPACK dsyevd); consumes `a`.
SymmetricEigen symmetric_eig(Eigen::MatrixXd a);

using BlockApplyFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct PartialEigOptions {
  int count = 10;         // eigenpairs wanted (largest algebraic)
  int block = 0;          // 0: count + 4
  int max_basis = 0;      // 0: 12 * block
  int max_restarts = 40;
  double rel_tol = 1e-11; // residual / lambda_1
  unsigned seed = 20240611u;
};

// Largest eigenpairs of a symmetric operator by restarted block Krylov with
// Rayleigh-Ritz. Blocks handle exactly degenerate eigenvalues.
SymmetricEigen partial_symmetric_eig(const BlockApplyFn& apply, Eigen::Index n,
                                     const PartialEigOptions& options);

}  // namespace subres::linalg
