#include "subres/asymptotics.hpp"

#include "subres/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace subres {

namespace {

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

double spectral_distance(const Eigen::VectorXd& eigenvalues, cplx kappa_sq) {
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < eigenvalues.size(); ++n)
    if (eigenvalues[n] > 0.0) dist = std::min(dist, std::abs(1.0 / eigenvalues[n] - kappa_sq));
  return dist;
}

}  // namespace

BoundSample mk0_inverse_bound(const SpectralData& spectral, cplx kappa) {
  if (!spectral.complete) throw PreconditionError("the norm bound needs the complete spectrum");
  const cplx k2 = kappa * kappa;
  const double lambda1 = spectral.lambda1();
  const double dist = spectral_distance(spectral.eigenvalues, k2);
  if (!(dist > 1e-12 * std::max(1.0, std::abs(k2))))
    throw PreconditionError("kappa^2 lies on the discrete spectrum");
  double lhs = 0.0;
  for (Eigen::Index n = 0; n < spectral.eigenvalues.size(); ++n)
    if (spectral.eigenvalues[n] > 0.0) lhs = std::max(lhs, 1.0 / std::abs(1.0 - k2 * spectral.eigenvalues[n]));
  const double rhs = std::numbers::sqrt2 * std::max(1.0 / lambda1, k2.real()) / dist;
  return {k2, lhs, rhs};
}

std::vector<BoundSample> mk0_bound_samples(const SpectralData& spectral, int count, unsigned seed,
                                           double min_dist) {
  if (count < 0) throw ConfigError("sample count must be non-negative");
  const double radius = 2.0 / spectral.lambda1();
  std::vector<BoundSample> out;
  std::uint64_t index = 1 + seed % 4096u;
  while (static_cast<int>(out.size()) < count) {
    const double u = radical_inverse(index, 2);
    const double v = radical_inverse(index, 3);
    ++index;
    const cplx k2 = std::polar(radius * std::sqrt(u), 2.0 * std::numbers::pi * v);
    if (spectral_distance(spectral.eigenvalues, k2) < min_dist) continue;
    out.push_back(mk0_inverse_bound(spectral, std::sqrt(k2)));
  }
  return out;
}

LocalizationConstants localization_constants(const std::vector<double>& lambdas, double volume,
                                             double diameter, double r) {
  if (lambdas.empty() || !(lambdas.front() > 0.0)) throw PreconditionError("empty spectrum");
  const double lambda1 = lambdas.front();
  if (!(r > 1.0 / lambda1)) throw PreconditionError("r must exceed 1/lambda_1");

  LocalizationConstants c;
  c.r = r;
  c.volume = volume;
  c.diameter = diameter;
  c.lambda1 = lambda1;
  for (double l : lambdas)
    if (l > 0.0) c.points.push_back(1.0 / l);
  std::sort(c.points.begin(), c.points.end());

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.points.size() && c.points[i] <= r; ++i)
    for (std::size_t j = 0; j < c.points.size(); ++j)
      if (j != i) min_gap = std::min(min_gap, std::abs(c.points[j] - c.points[i]));
  if (!std::isfinite(min_gap) || !(min_gap > 0.0))
    throw DomainError("r_circ undefined: need a second spectral point; enlarge the mesh-trusted range");

  c.r_circ = 0.5 * min_gap;
  c.r_plus = r + c.r_circ;
  const double sr = std::sqrt(c.r_plus);
  c.c_r = std::numbers::sqrt2 *
          (std::sqrt(volume / (4.0 * std::numbers::pi)) * sr * std::exp(sr * diameter) + lambda1) *
          c.r_plus * c.r_plus;
  c.eps_max = c.r_circ / c.c_r;
  return c;
}

LocalizationConstants localization_constants(const SpectralData& spectral, const DiscreteDomain& domain,
                                             double r) {
  std::vector<double> lambdas;
  for (const Cluster& cl : spectral.trusted_clusters()) lambdas.push_back(cl.lambda);
  return localization_constants(lambdas, domain.total_volume(), domain.diameter(), r);
}

bool LocalizationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const DiscAssignment& d) { return d.pass; });
}

LocalizationReport check_localization(const std::vector<ResonanceResult>& resonances,
                                      const LocalizationConstants& constants, double eps) {
  if (eps > constants.eps_max)
    throw HypothesisNotMet("epsilon exceeds eps_max = " + std::to_string(constants.eps_max));
  LocalizationReport report;
  report.epsilon = eps;
  report.disc_radius = constants.c_r * eps;
  for (const ResonanceResult& res : resonances) {
    if (!(std::abs(res.kappa_sq) < constants.r_plus)) continue;
    DiscAssignment d;
    d.kappa_sq = res.kappa_sq;
    d.distance = std::numeric_limits<double>::infinity();
    for (double p : constants.points) {
      const double dist = std::abs(res.kappa_sq - p);
      if (dist <= report.disc_radius + 1e-10 * p) ++d.discs_containing;
      if (dist < d.distance) {
        d.distance = dist;
        d.assigned_lambda = 1.0 / p;
      }
    }
    d.pass = d.discs_containing == 1;
    report.entries.push_back(d);
  }
  return report;
}

std::vector<ExpansionPrediction> predict_first_order(const SpectralData& spectral, std::size_t cluster_index) {
  if (cluster_index >= spectral.clusters.size()) throw PreconditionError("cluster index out of range");
  const Cluster& cl = spectral.clusters[cluster_index];
  const Eigen::Index m = cl.multiplicity();
  const Eigen::MatrixXd e = spectral.eigenvectors.middleCols(cl.begin, m);
  const Eigen::VectorXd c = e.transpose() * spectral.weights;

  // Orthonormal basis of the cluster coefficients whose first column is c/|c|.
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(m, m);
  const double c_norm = c.norm();
  if (m > 1 && c_norm > 1e-12 * std::sqrt(spectral.weights.sum())) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    q = qr.householderQ();
    if (q.col(0).dot(c) < 0) q.col(0) *= -1.0;
  }

  std::vector<ExpansionPrediction> out;
  const double lambda = cl.lambda;
  for (Eigen::Index j = 0; j < m; ++j) {
    ExpansionPrediction p;
    p.lambda = m == 1 ? spectral.eigenvalues[cl.begin] : lambda;
    p.gauge_vector = e * q.col(j);
    const double coupling = p.gauge_vector.dot(spectral.weights);
    p.coupling_sq = coupling * coupling;
    p.cluster_summed = m > 1 && j == 0;
    p.zeroth = 1.0 / p.lambda;
    p.first_coeff = cplx(0.0, -p.coupling_sq / (4.0 * std::numbers::pi * std::pow(p.lambda, 2.5)));
    out.push_back(std::move(p));
  }
  return out;
}

ExpansionFit fit_expansion(const std::vector<std::pair<double, cplx>>& samples, double eps_max) {
  std::set<double> distinct;
  for (const auto& [eps, k2] : samples) {
    if (!(eps >= 0.0)) throw ConfigError("fit samples need eps >= 0");
    if (eps > eps_max) throw PreconditionError("fit sample eps exceeds eps_max");
    distinct.insert(eps);
  }
  if (distinct.size() < 3) throw ConfigError("fit_expansion needs at least 3 distinct eps values");

  const double top = *distinct.rbegin();
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXcd a(n, 3);
  Eigen::VectorXcd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = samples[i].first / top;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    y[i] = samples[i].second;
  }
  const Eigen::VectorXcd coef = a.colPivHouseholderQr().solve(y);

  ExpansionFit fit;
  fit.zeroth_fit = coef[0];
  fit.first_fit = coef[1] / top;
  fit.second_fit = coef[2] / (top * top);

  double r_top = 0.0, r_half = 0.0, eps_half = 0.0, best = std::numeric_limits<double>::infinity();
  for (const auto& [eps, k2] : samples) {
    const cplx r = k2 - fit.zeroth_fit - fit.first_fit * eps;
    fit.residuals.emplace_back(eps, r);
    if (eps == top) r_top = std::max(r_top, std::abs(r));
    if (eps > 0.0 && eps < top && std::abs(eps - 0.5 * top) < best) {
      best = std::abs(eps - 0.5 * top);
      eps_half = eps;
    }
  }
  for (const auto& [eps, r] : fit.residuals)
    if (eps == eps_half) r_half = std::max(r_half, std::abs(r));

  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::abs(s.second));
  const double floor = 1e-12 * std::max(1.0, scale);
  if (r_top <= floor || r_half <= floor || eps_half == 0.0) fit.remainder_order = 0.0;
  else fit.remainder_order = std::log(r_top / r_half) / std::log(top / eps_half);
  return fit;
}

std::vector<double> default_eps_grid(double eps_max) {
  if (!(eps_max > 0.0)) throw PreconditionError("eps_max must be positive");
  const double e0 = std::min(0.04, 0.5 * eps_max);
  return {0.25 * e0, 0.5 * e0, e0};
}

}  // namespace subres
