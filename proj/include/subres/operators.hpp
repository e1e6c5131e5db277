#pragma once

#include "subres/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>

namespace subres {

using cplx = std::complex<double>;

enum class OperatorKind { newton, derivative, characteristic };

const char* to_string(OperatorKind kind);

// Contrast parameter eps of the inclusion, 0 < eps < 1.
class ContrastConfig {
 public:
  explicit ContrastConfig(double epsilon);
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

// Dense matrix of one of N_kappa, N^(1)_kappa or M_kappa(eps) acting on cell
// values. Entries satisfy (A u)_i = sum_j A_ij u_j; the L2(Omega) pairing is
// <u, v> = sum_i V_i conj(u_i) v_i with V = weights.
struct KernelOperator {
  OperatorKind kind = OperatorKind::newton;
  cplx kappa{0.0, 0.0};
  double epsilon = 0.0;  // characteristic only
  Eigen::MatrixXcd entries;
  Eigen::VectorXd weights;

  Eigen::Index n() const noexcept { return entries.rows(); }
  // D^{1/2} A D^{-1/2}; its Euclidean geometry is the weighted geometry of A.
  Eigen::MatrixXcd weighted() const;
};

KernelOperator assemble_newton(const DiscreteDomain& domain, cplx kappa);
KernelOperator assemble_derivative(const DiscreteDomain& domain, cplx kappa);
KernelOperator assemble_characteristic(const DiscreteDomain& domain, cplx kappa, double eps);

// Operator 2-norm in the volume-weighted inner product.
double weighted_norm(const KernelOperator& op);

double weighted_inner_norm(const Eigen::VectorXd& weights, const Eigen::VectorXcd& u);
cplx weighted_dot(const Eigen::VectorXd& weights, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);

// Fixture dump: u64 n, f64 kappa re/im, u64 kind tag, f64 eps, then n*n
// row-major (re, im) pairs, all little-endian. Weights are not stored.
void write_operator_dump(const KernelOperator& op, const std::filesystem::path& path);
KernelOperator read_operator_dump(const std::filesystem::path& path, const Eigen::VectorXd& weights);

// Weighted (symmetrized) forms used by the solvers. For S = D^{1/2} A D^{-1/2}
// the Newton kernel gives S_ij = sqrt(V_i V_j) G(x_i - x_j), complex symmetric.
namespace weighted_form {

Eigen::MatrixXcd newton(const DiscreteDomain& domain, cplx kappa);

// S(kappa) and dS/dkappa in one pass.
void newton_with_derivative(const DiscreteDomain& domain, cplx kappa, Eigen::MatrixXcd& value,
                            Eigen::MatrixXcd& derivative);

// I - (1 - eps^2) kappa^2 S(eps kappa).
Eigen::MatrixXcd characteristic(const DiscreteDomain& domain, cplx kappa, double eps);

// Characteristic matrix and its kappa-derivative
//   -2 (1 - eps^2) kappa S(eps kappa) - (1 - eps^2) kappa^2 eps S'(eps kappa).
void characteristic_with_derivative(const DiscreteDomain& domain, cplx kappa, double eps,
                                    Eigen::MatrixXcd& value, Eigen::MatrixXcd& derivative);

}  // namespace weighted_form

}  // namespace subres
