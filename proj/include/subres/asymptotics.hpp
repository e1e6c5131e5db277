#pragma once

#include "subres/geometry.hpp"
#include "subres/resonances.hpp"
#include "subres/spectral.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace subres {

struct ExpansionPrediction {
  double lambda = 0.0;
  double coupling_sq = 0.0;     // |<1, e>|^2 of the gauge vector
  bool cluster_summed = false;  // gauge vector of a degenerate cluster
  double zeroth = 0.0;          // 1 / lambda
  cplx first_coeff;             // -i coupling_sq / (4 pi lambda^{5/2})
  Eigen::VectorXd gauge_vector;
};

struct LocalizationConstants {
  double r = 0.0;
  double r_circ = 0.0;
  double r_plus = 0.0;
  double c_r = 0.0;
  double eps_max = 0.0;
  double volume = 0.0;
  double diameter = 0.0;
  double lambda1 = 0.0;
  std::vector<double> points;  // discrete sigma(N_0^{-1}) surrogate, ascending
};

struct BoundSample {
  cplx kappa_sq;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const noexcept { return lhs <= rhs; }
};

// ||M_kappa(0)^{-1}|| from the spectrum against the norm bound.
BoundSample mk0_inverse_bound(const SpectralData& spectral, cplx kappa);

// Quasi-random (Halton) kappa^2 in |kappa^2| <= 2/lambda_1 at distance >= min_dist
// from the discrete spectrum.
std::vector<BoundSample> mk0_bound_samples(const SpectralData& spectral, int count, unsigned seed,
                                           double min_dist = 1e-3);

LocalizationConstants localization_constants(const SpectralData& spectral, const DiscreteDomain& domain,
                                             double r);
// Same from an explicit eigenvalue list (descending) and domain measures.
LocalizationConstants localization_constants(const std::vector<double>& lambdas, double volume,
                                             double diameter, double r);

struct DiscAssignment {
  cplx kappa_sq;
  double assigned_lambda = 0.0;
  double distance = 0.0;
  int discs_containing = 0;
  bool pass = false;
};

struct LocalizationReport {
  double epsilon = 0.0;
  double disc_radius = 0.0;  // c_r * eps
  std::vector<DiscAssignment> entries;
  bool all_pass() const;
};

LocalizationReport check_localization(const std::vector<ResonanceResult>& resonances,
                                      const LocalizationConstants& constants, double eps);

std::vector<ExpansionPrediction> predict_first_order(const SpectralData& spectral, std::size_t cluster_index);

struct ExpansionFit {
  cplx zeroth_fit;
  cplx first_fit;
  cplx second_fit;
  double remainder_order = 0.0;  // 0 when the linear part already fits to round-off
  std::vector<std::pair<double, cplx>> residuals;  // kappa^2 - zeroth - first * eps
};

// Least-squares a + b eps + c eps^2. The remainder order compares the residual
// of the linear part at the largest eps with the sample closest to half of it.
ExpansionFit fit_expansion(const std::vector<std::pair<double, cplx>>& samples,
                           double eps_max = std::numeric_limits<double>::infinity());

// {eps0/4, eps0/2, eps0} with eps0 = min(0.04, eps_max/2).
std::vector<double> default_eps_grid(double eps_max);

}  // namespace subres
