#include "subres/field.hpp"

#include "subres/errors.hpp"
#include "subres/io.hpp"
#include "subres/kernel.hpp"
#include "subres/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace subres {

namespace {

void validate(const ScatterScenario& sc) {
  if (!sc.domain) throw ConfigError("scenario has no domain");
  if (!(sc.epsilon > 0.0 && sc.epsilon <= 1.0)) throw ConfigError("scenario epsilon must lie in (0, 1]");
  const double limit = sc.epsilon * sc.domain->circumradius();
  if (!(sc.source.norm() > limit)) throw GeometryError("source point lies inside the scaled inclusion");
  for (const Vec3& x : sc.observations)
    if (!(x.norm() > limit)) throw GeometryError("observation point lies inside the scaled inclusion");
  const cplx k2 = sc.kappa * sc.kappa;
  for (const cplx& r : sc.known_resonances_sq)
    if (std::abs(k2 - r) <= 1e-6 * std::max(1.0, std::abs(r)))
      throw ResonanceProximityError("kappa^2 is within 1e-6 of a computed resonance");
}

struct Solved {
  Eigen::VectorXcd density;  // g_in, cell values
  double minv_norm = 0.0;
};

Solved solve(const ScatterScenario& sc, const DiscreteDomain& phys, bool want_norm) {
  const double eps = sc.epsilon;
  const cplx k = sc.kappa;
  const Eigen::Index n = static_cast<Eigen::Index>(phys.size());
  Solved out;
  if (eps == 1.0) {
    out.density = Eigen::VectorXcd::Zero(n);
    out.minv_norm = 1.0;
    return out;
  }
  const Eigen::VectorXd root = phys.volumes().cwiseSqrt();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(physical_characteristic(phys, k, eps));
  if (lu.rcond() < 1e-12)
    throw ResonanceProximityError("scattering system is near-singular (condition estimate > 1e12)");
  Eigen::VectorXcd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rhs[i] = root[i] * kernel::green(k, (phys[i].center - sc.source).norm());
  const Eigen::VectorXcd y = lu.solve(rhs);
  out.density = ((1.0 - eps * eps) * k * k) * (root.cwiseInverse().cast<cplx>().asDiagonal() * y);
  if (want_norm) out.minv_norm = eps * eps * linalg::inverse_norm(lu);
  return out;
}

std::vector<cplx> scattered_at(const ScatterScenario& sc, const DiscreteDomain& phys, const Eigen::VectorXcd& g) {
  std::vector<cplx> out;
  for (const Vec3& x : sc.observations) {
    cplx u = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
      u += kernel::green(sc.kappa, (x - phys[i].center).norm()) * g[static_cast<Eigen::Index>(i)] * phys[i].volume;
    out.push_back(u);
  }
  return out;
}

}  // namespace

DiscreteDomain scaled_domain(const DiscreteDomain& reference, double eps) {
  if (!(eps > 0.0)) throw ConfigError("scale factor must be positive");
  std::vector<Cell> cells;
  cells.reserve(reference.size());
  for (const Cell& c : reference.cells()) cells.push_back(Cell::cuboid(eps * c.center, eps * c.extent));
  return DiscreteDomain(std::move(cells), VoxelKind{"scaled:" + io::fmt(eps)}, eps * reference.diameter());
}

Eigen::MatrixXcd physical_characteristic(const DiscreteDomain& physical, cplx kappa, double eps) {
  Eigen::MatrixXcd s = weighted_form::newton(physical, kappa);
  s *= -(1.0 - eps * eps) * kappa * kappa;
  s.diagonal().array() += eps * eps;
  return s;
}

Eigen::VectorXcd interior_density(const ScatterScenario& scenario) {
  validate(scenario);
  return solve(scenario, scaled_domain(*scenario.domain, scenario.epsilon), false).density;
}

FieldValues scattered_field(const ScatterScenario& scenario) {
  validate(scenario);
  const DiscreteDomain phys = scaled_domain(*scenario.domain, scenario.epsilon);
  const Eigen::VectorXcd g = solve(scenario, phys, false).density;
  FieldValues out;
  out.scattered = scattered_at(scenario, phys, g);
  for (std::size_t j = 0; j < scenario.observations.size(); ++j)
    out.total.push_back(kernel::green(scenario.kappa, (scenario.observations[j] - scenario.source).norm()) +
                        out.scattered[j]);
  return out;
}

std::vector<Peak> local_maxima(const std::vector<double>& grid, const std::vector<double>& values) {
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) peaks.push_back({grid[i], values[i]});
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return peaks;
}

SweepResult frequency_sweep(const ScatterScenario& scenario, const std::vector<double>& kappa_sq_grid) {
  if (kappa_sq_grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 0; i < kappa_sq_grid.size(); ++i) {
    if (!(kappa_sq_grid[i] > 0.0)) throw ConfigError("sweep grid must be positive");
    if (i > 0 && !(kappa_sq_grid[i] > kappa_sq_grid[i - 1]))
      throw ConfigError("sweep grid must be strictly increasing");
  }
  if (scenario.observations.empty()) throw ConfigError("sweep needs an observation point");
  ScatterScenario probe = scenario;
  probe.kappa = std::sqrt(kappa_sq_grid.front());
  validate(probe);

  const DiscreteDomain phys = scaled_domain(*scenario.domain, scenario.epsilon);
  const std::size_t m = kappa_sq_grid.size();
  SweepResult out;
  out.kappa_sq_grid = kappa_sq_grid;
  out.field_abs.assign(m, 0.0);
  out.minv_norm.assign(m, 0.0);
  std::vector<std::exception_ptr> failures(m);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < m; ++i) {
    try {
      ScatterScenario sc = scenario;
      sc.kappa = std::sqrt(kappa_sq_grid[i]);
      validate(sc);
      const Solved s = solve(sc, phys, true);
      sc.observations.resize(1);
      out.field_abs[i] = std::abs(scattered_at(sc, phys, s.density).front());
      out.minv_norm[i] = s.minv_norm;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  out.field_peaks = local_maxima(out.kappa_sq_grid, out.field_abs);
  out.minv_peaks = local_maxima(out.kappa_sq_grid, out.minv_norm);
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "kappa_sq,response_field_abs,response_minv_norm\n";
  for (std::size_t i = 0; i < sweep.kappa_sq_grid.size(); ++i)
    out += io::fmt(sweep.kappa_sq_grid[i]) + ',' + io::fmt(sweep.field_abs[i]) + ',' + io::fmt(sweep.minv_norm[i]) +
           '\n';
  return out;
}

}  // namespace subres
