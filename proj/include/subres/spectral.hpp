#pragma once

#include "subres/geometry.hpp"
#include "subres/operators.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace subres {

inline constexpr double kDefaultClusterTol = 1e-2;
// Modes below this fraction of lambda_1 are not used to seed resonances.
inline constexpr double kTrustFraction = 1e-6;

// Consecutive run [begin, end) of numerically degenerate eigenvalues.
struct Cluster {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  double lambda = 0.0;  // arithmetic mean
  Eigen::Index multiplicity() const noexcept { return end - begin; }
};

struct SpectralData {
  Eigen::VectorXd eigenvalues;   // descending, round-off negatives clamped to 0
  Eigen::MatrixXd eigenvectors;  // column n holds e_n at the cell centers
  Eigen::VectorXd weights;       // cell volumes
  std::vector<Cluster> clusters;
  std::string mesh_id;
  bool complete = true;          // false when only the leading modes were computed

  double lambda1() const { return eigenvalues[0]; }
  double trust_threshold() const { return kTrustFraction * eigenvalues[0]; }
  // Clusters above the trust threshold, in descending order of lambda.
  std::vector<Cluster> trusted_clusters() const;
  // Index into `clusters` of the cluster containing mode j, or -1.
  int cluster_of(Eigen::Index j) const;
};

// Full eigendecomposition of a newton(0) operator.
SpectralData eig_newton0(const KernelOperator& op, double cluster_tol = kDefaultClusterTol);
SpectralData eig_newton0(const DiscreteDomain& domain, double cluster_tol = kDefaultClusterTol);

// Leading `count` modes only, matrix-free (lattice domains). Suitable for meshes
// too large for dense storage.
SpectralData eig_newton0_partial(const DiscreteDomain& domain, int count,
                                 double cluster_tol = kDefaultClusterTol);

std::vector<Cluster> cluster(const SpectralData& spectral, double rel_tol);
std::vector<Cluster> cluster_values(const Eigen::VectorXd& descending, double rel_tol);

// <1, e_j> = sum_i V_i e_j(x_i).
cplx coupling(const SpectralData& spectral, Eigen::Index j);

struct BallOracleEigenvalue {
  int l = 0;
  int n = 0;
  double k_root = 0.0;
  double lambda = 0.0;
  int multiplicity = 1;
};

// k j_l'(k) + (l + 1) j_l(k); its positive roots give the unit-ball spectrum.
double ball_oracle_condition(int l, double k);
std::vector<BallOracleEigenvalue> ball_oracle(int l_max, int n_max);

std::string spectrum_csv(const SpectralData& spectral);
std::string oracle_csv(const std::vector<BallOracleEigenvalue>& oracle);

}  // namespace subres
