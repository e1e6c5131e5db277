#pragma once

#include "subres/geometry.hpp"
#include "subres/operators.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace subres {

// Point source scattering off the inclusion Omega_eps = eps * Omega.
struct ScatterScenario {
  const DiscreteDomain* domain = nullptr;  // reference Omega
  double epsilon = 0.05;                   // (0, 1]
  Vec3 source{2.0, 0.0, 0.0};              // physical coordinates
  std::vector<Vec3> observations;
  cplx kappa{1.0, 0.0};
  std::vector<cplx> known_resonances_sq;  // optional, for the proximity precondition
};

// Cells of Omega_eps: centers, extents and volumes scaled by eps.
DiscreteDomain scaled_domain(const DiscreteDomain& reference, double eps);

// S_kappa(eps) = eps^2 I - (1 - eps^2) kappa^2 N^{phys}_kappa, weighted form.
Eigen::MatrixXcd physical_characteristic(const DiscreteDomain& physical, cplx kappa, double eps);

// Density g_in on the Omega_eps cells such that the total field outside is
// G(x - x_s) + sum_i G(x - y_i) g_in(y_i) V_i^eps.
Eigen::VectorXcd interior_density(const ScatterScenario& scenario);

struct FieldValues {
  std::vector<cplx> total;
  std::vector<cplx> scattered;
};

FieldValues scattered_field(const ScatterScenario& scenario);

struct Peak {
  double kappa_sq = 0.0;
  double value = 0.0;
};

struct SweepResult {
  std::vector<double> kappa_sq_grid;
  std::vector<double> field_abs;   // |scattered| at the first observation point
  std::vector<double> minv_norm;   // ||M_kappa(eps)^{-1}|| in the weighted norm
  std::vector<Peak> field_peaks;   // strict 3-point local maxima, largest first
  std::vector<Peak> minv_peaks;
};

SweepResult frequency_sweep(const ScatterScenario& scenario, const std::vector<double>& kappa_sq_grid);

std::vector<Peak> local_maxima(const std::vector<double>& grid, const std::vector<double>& values);

std::string sweep_csv(const SweepResult& sweep);

}  // namespace subres
