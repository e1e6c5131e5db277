#pragma once

#include "subres/geometry.hpp"
#include "subres/operators.hpp"
#include "subres/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace subres {

enum class SolverMethod { newton_track, contour };
const char* to_string(SolverMethod method);

// Unperturbed eigenpair (lambda_o, e_o) a search starts from.
struct ModeSeed {
  double lambda = 0.0;
  Eigen::VectorXd vector;  // cell values, weighted-normalized
};

ModeSeed seed_from(const SpectralData& spectral, Eigen::Index mode);

struct ResonanceResult {
  cplx kappa;
  cplx kappa_sq;
  double seed_lambda = 0.0;
  Eigen::VectorXcd kernel_vector;  // cell values, weighted-normalized
  double residual = 0.0;           // ||M_kappa(eps) v||_weighted
  int multiplicity = 1;
  SolverMethod method = SolverMethod::newton_track;
  double epsilon = 0.0;
  cplx unpolished_kappa;           // contour estimate before Newton polishing
  int iterations = 0;
};

struct TrackOptions {
  int max_iterations = 50;
  double tolerance = 1e-13;  // target residual
  int max_halvings = 8;
};

// Characteristic point of M_kappa(eps) continued from kappa_0 = lambda_o^{-1/2}.
ResonanceResult track_resonance(const DiscreteDomain& domain, double eps, const ModeSeed& seed,
                                const TrackOptions& options = {});

// Runs the tracker from every mode of a cluster and merges coincident roots.
std::vector<ResonanceResult> track_cluster(const DiscreteDomain& domain, double eps,
                                           const SpectralData& spectral, const Cluster& cluster,
                                           const TrackOptions& options = {});

struct EigenSample {
  cplx z;
  cplx zeta;
  Eigen::VectorXcd vector;  // cell values, weighted-normalized
  double gap = 0.0;         // distance to the nearest other eigenvalue of N_z found
};

struct EigenPath {
  std::vector<EigenSample> samples;
  ModeSeed seed;
};

// Follows the eigenpair of N_z from (lambda_o, e_o) at z = 0 along z_targets.
EigenPath eigen_path(const DiscreteDomain& domain, const ModeSeed& seed, const std::vector<cplx>& z_targets);

struct ContourOptions {
  int n_quad = 48;
  int max_rank = 6;
  double rank_tolerance = 1e-9;
  unsigned seed = 977u;
};

// All characteristic points inside |kappa - center| < radius by the
// contour-moment method, counted with multiplicity and polished by Newton.
std::vector<ResonanceResult> contour_solver(const DiscreteDomain& domain, double eps, cplx center,
                                            double radius, const ContourOptions& options = {});

// Resonances with kappa^2 in D_{r_+}, one contour search per trusted cluster.
std::vector<ResonanceResult> resonance_set(const DiscreteDomain& domain, const SpectralData& spectral,
                                           double eps, double r, const ContourOptions& options = {});

// Contour circle for one cluster: centered at lambda^{-1/2}, well inside the
// gaps to neighbouring clusters.
double contour_radius_for(const SpectralData& spectral, std::size_t cluster_index);

// Sum of multiplicities.
int count_with_multiplicity(const std::vector<ResonanceResult>& results);

std::string resonances_csv(const std::vector<ResonanceResult>& results);

}  // namespace subres
