#pragma once

#include "subres/geometry.hpp"

#include <Eigen/Dense>

#include <memory>

namespace subres {

// Matrix-free weighted Newton operator N_0 on a lattice domain, applied by
// zero-padded FFT convolution in O(n log n). Agrees entrywise with
// weighted_form::newton(domain, 0).
class LatticeNewtonOperator {
 public:
  explicit LatticeNewtonOperator(const DiscreteDomain& domain);
  ~LatticeNewtonOperator();
  LatticeNewtonOperator(const LatticeNewtonOperator&) = delete;
  LatticeNewtonOperator& operator=(const LatticeNewtonOperator&) = delete;

  Eigen::Index size() const noexcept { return n_; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

  // Weighted trace: the sum of the self terms.
  double trace() const noexcept { return self_term_ * static_cast<double>(n_); }

 private:
  struct Plans;
  Eigen::Index n_ = 0;
  double self_term_ = 0.0;
  std::array<int, 3> padded_{};
  std::vector<std::size_t> slot_;  // padded-grid linear index of each cell
  std::unique_ptr<Plans> plans_;
};

}  // namespace subres
