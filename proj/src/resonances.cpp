#include "subres/resonances.hpp"

#include "subres/asymptotics.hpp"
#include "subres/errors.hpp"
#include "subres/io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

namespace subres {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kSheetTol = 1e-8;
constexpr double kMaxResidual = 1e-9;
constexpr double kMergeTol = 1e-8;

cplx sym_dot(const VectorXcd& a, const VectorXcd& b) { return (a.array() * b.array()).sum(); }

// Complex-symmetric Rayleigh quotient y^T W y / y^T y.
cplx rayleigh(const MatrixXcd& w, const VectorXcd& y) { return sym_dot(y, w * y) / sym_dot(y, y); }

struct Refined {
  cplx kappa;
  VectorXcd y;  // weighted form, unit 2-norm
  double residual = 0.0;
  int iterations = 0;
};

// Newton on the eigenvalue mu(kappa) of the weighted characteristic matrix
// closest to zero, with the eigenvector refreshed by inverse iteration.
Refined refine_root(const DiscreteDomain& domain, double eps, cplx kappa, VectorXcd y,
                    const TrackOptions& options) {
  MatrixXcd w, wd;
  double residual = std::numeric_limits<double>::infinity();
  y.normalize();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    weighted_form::characteristic_with_derivative(domain, kappa, eps, w, wd);
    Eigen::PartialPivLU<MatrixXcd> lu(w);
    for (int s = 0; s < 2; ++s) {
      VectorXcd next = lu.solve(y);
      const double nn = next.norm();
      if (!std::isfinite(nn) || nn == 0.0) break;
      y = next / nn;
    }
    residual = (w * y).norm();
    const cplx mu = rayleigh(w, y);
    const cplx dmu = sym_dot(y, wd * y) / sym_dot(y, y);
    if (residual < options.tolerance) break;
    if (dmu == cplx(0.0, 0.0)) throw SolverError("characteristic derivative vanished", residual);
    const cplx delta = -mu / dmu;
    if (std::abs(delta) < 4e-16 * std::abs(kappa) && residual < kMaxResidual) break;

    double t = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const cplx trial = kappa + t * delta;
      const double mu_trial = std::abs(rayleigh(weighted_form::characteristic(domain, trial, eps), y));
      if (mu_trial < std::abs(mu) || h == options.max_halvings) break;
      t *= 0.5;
    }
    kappa += t * delta;
  }
  if (!(residual < kMaxResidual))
    throw SolverError("resonance Newton iteration did not converge", residual);
  return {kappa, y, residual, it + 1};
}

// Weighted-form unit vector -> cell values with unit weighted norm, phase chosen
// so that <e_o, v>_weighted is real and positive when a reference is given.
VectorXcd to_cells(const DiscreteDomain& domain, const VectorXcd& y, const VectorXcd* reference_y) {
  VectorXcd z = y;
  cplx phase = 1.0;
  if (reference_y) phase = reference_y->dot(y);
  else {
    Eigen::Index arg;
    z.cwiseAbs().maxCoeff(&arg);
    phase = z[arg];
  }
  if (std::abs(phase) > 0) z *= std::conj(phase) / std::abs(phase);
  const VectorXd root = domain.volumes().cwiseSqrt();
  return root.cwiseInverse().cast<cplx>().asDiagonal() * z;
}

VectorXcd weighted_seed(const DiscreteDomain& domain, const ModeSeed& seed) {
  if (seed.vector.size() != static_cast<Eigen::Index>(domain.size()))
    throw PreconditionError("seed vector does not match the mesh");
  const VectorXd root = domain.volumes().cwiseSqrt();
  VectorXcd y = root.cwiseProduct(seed.vector).cast<cplx>();
  const double nrm = y.norm();
  if (nrm == 0.0) throw PreconditionError("seed vector is zero");
  return y / nrm;
}

void check_sheet(const ResonanceResult& r) {
  if (r.epsilon > 0.0 && r.kappa.imag() > kSheetTol) {
    std::ostringstream msg;
    msg << "converged characteristic point kappa = " << r.kappa << " lies in the upper half-plane";
    throw SheetError(msg.str());
  }
}

bool kappa_less(const ResonanceResult& a, const ResonanceResult& b) {
  if (a.kappa_sq.real() != b.kappa_sq.real()) return a.kappa_sq.real() < b.kappa_sq.real();
  return a.kappa_sq.imag() < b.kappa_sq.imag();
}

// Groups roots closer than kMergeTol (relative). Multiplicities add up; the
// representative keeps the smallest residual.
std::vector<ResonanceResult> merge(std::vector<ResonanceResult> roots) {
  std::sort(roots.begin(), roots.end(), kappa_less);
  std::vector<ResonanceResult> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    ResonanceResult rep = roots[i];
    int mult = roots[i].multiplicity;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double scale = std::max(1.0, std::abs(roots[i].kappa));
      if (std::abs(roots[j].kappa - roots[i].kappa) < kMergeTol * scale) {
        used[j] = true;
        mult += roots[j].multiplicity;
        if (roots[j].residual < rep.residual) {
          const cplx raw = rep.unpolished_kappa;
          rep = roots[j];
          if (rep.method == SolverMethod::contour) rep.unpolished_kappa = raw;
        }
      }
    }
    rep.multiplicity = mult;
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

const char* to_string(SolverMethod method) {
  return method == SolverMethod::newton_track ? "newton_track" : "contour";
}

ModeSeed seed_from(const SpectralData& spectral, Eigen::Index mode) {
  if (mode < 0 || mode >= spectral.eigenvectors.cols()) throw PreconditionError("mode index out of range");
  const double lambda = spectral.eigenvalues[mode];
  if (!(lambda >= spectral.trust_threshold()) || lambda <= 0.0)
    throw PreconditionError("seed eigenvalue is below the mesh-trust threshold");
  return {lambda, spectral.eigenvectors.col(mode)};
}

ResonanceResult track_resonance(const DiscreteDomain& domain, double eps, const ModeSeed& seed,
                                const TrackOptions& options) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!(seed.lambda > 0.0)) throw PreconditionError("seed eigenvalue must be positive");
  const VectorXcd y0 = weighted_seed(domain, seed);
  const Refined r = refine_root(domain, eps, cplx(1.0 / std::sqrt(seed.lambda), 0.0), y0, options);

  ResonanceResult out;
  out.kappa = r.kappa;
  out.kappa_sq = r.kappa * r.kappa;
  out.seed_lambda = seed.lambda;
  out.kernel_vector = to_cells(domain, r.y, &y0);
  out.residual = r.residual;
  out.method = SolverMethod::newton_track;
  out.epsilon = eps;
  out.unpolished_kappa = r.kappa;
  out.iterations = r.iterations;
  check_sheet(out);
  return out;
}

std::vector<ResonanceResult> track_cluster(const DiscreteDomain& domain, double eps,
                                           const SpectralData& spectral, const Cluster& cluster,
                                           const TrackOptions& options) {
  std::vector<ResonanceResult> roots;
  for (Eigen::Index j = cluster.begin; j < cluster.end; ++j) {
    ResonanceResult r = track_resonance(domain, eps, seed_from(spectral, j), options);
    r.seed_lambda = cluster.lambda;
    roots.push_back(std::move(r));
  }
  return merge(std::move(roots));
}

EigenPath eigen_path(const DiscreteDomain& domain, const ModeSeed& seed, const std::vector<cplx>& z_targets) {
  EigenPath path;
  path.seed = seed;
  const Eigen::Index n = static_cast<Eigen::Index>(domain.size());
  VectorXcd y = weighted_seed(domain, seed);
  const VectorXcd y_seed = y;
  cplx z_prev = 0.0;
  cplx zeta = seed.lambda;
  const double max_step = 1.0 / domain.diameter();

  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> normal;
  VectorXcd probe(n);
  for (Eigen::Index i = 0; i < n; ++i) probe[i] = normal(rng);

  for (const cplx z : z_targets) {
    if (std::abs(z - z_prev) > max_step)
      throw PreconditionError("eigen_path step exceeds 1/diameter; refine the path");
    if (z == cplx(0.0, 0.0)) {
      path.samples.push_back({z, cplx(seed.lambda, 0.0), to_cells(domain, y_seed, &y_seed), 0.0});
      y = y_seed;
      zeta = seed.lambda;
      z_prev = z;
      continue;
    }
    const MatrixXcd s = weighted_form::newton(domain, z);
    MatrixXcd shifted = s;
    shifted.diagonal().array() -= zeta;
    Eigen::PartialPivLU<MatrixXcd> lu(shifted);

    MatrixXcd block(n, 2);
    block.col(0) = y;
    block.col(1) = probe;
    for (int it = 0; it < 6; ++it) {
      block = lu.solve(block);
      Eigen::HouseholderQR<MatrixXcd> qr(block);
      block = qr.householderQ() * MatrixXcd::Identity(n, 2);
    }
    const MatrixXcd h = block.adjoint() * s * block;
    Eigen::ComplexEigenSolver<MatrixXcd> es(h);
    const int pick = std::abs(es.eigenvalues()[0] - zeta) <= std::abs(es.eigenvalues()[1] - zeta) ? 0 : 1;
    const cplx other = es.eigenvalues()[1 - pick];
    VectorXcd next = block * es.eigenvectors().col(pick);
    next.normalize();
    const cplx overlap = y.dot(next);
    if (std::abs(overlap) < 0.9)
      throw PathError("eigenvector jumped branches along the path (overlap " +
                      io::fmt(std::abs(overlap)) + ")");
    next *= std::conj(overlap) / std::abs(overlap);
    const cplx zeta_next = rayleigh(s, next);
    const double gap = std::abs(other - zeta_next);
    if (gap < 1e-4 * seed.lambda)
      throw PathError("eigenvalue collision along the path at z = " + io::fmt(z.real()) + " + " +
                      io::fmt(z.imag()) + "i");
    y = next;
    zeta = zeta_next;
    z_prev = z;
    path.samples.push_back({z, zeta, to_cells(domain, y, &y_seed), gap});
  }
  return path;
}

std::vector<ResonanceResult> contour_solver(const DiscreteDomain& domain, double eps, cplx center,
                                            double radius, const ContourOptions& options) {
  if (options.n_quad < 32) throw PreconditionError("contour needs n_quad >= 32");
  if (options.max_rank < 1) throw PreconditionError("contour needs max_rank >= 1");
  if (!(radius > 0.0)) throw PreconditionError("contour radius must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");

  const Eigen::Index n = static_cast<Eigen::Index>(domain.size());
  const Eigen::Index ell = std::min<Eigen::Index>(options.max_rank, n);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  MatrixXcd probes(n, ell);
  for (Eigen::Index j = 0; j < ell; ++j)
    for (Eigen::Index i = 0; i < n; ++i) probes(i, j) = cplx(normal(rng), normal(rng));

  MatrixXcd a0 = MatrixXcd::Zero(n, ell);
  MatrixXcd a1 = MatrixXcd::Zero(n, ell);
  double scale = 0.0;
  const int nq = options.n_quad;
  for (int k = 0; k < nq; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k + 0.5) / nq;
    const cplx unit = std::polar(1.0, theta);
    const cplx kappa = center + radius * unit;
    Eigen::PartialPivLU<MatrixXcd> lu(weighted_form::characteristic(domain, kappa, eps));
    if (lu.rcond() < 1e-13)
      throw SolverError("contour passes through a characteristic point; change the radius", lu.rcond());
    const MatrixXcd x = lu.solve(probes);
    scale = std::max(scale, x.norm());
    const cplx w = radius * unit / static_cast<double>(nq);
    a0 += w * x;
    a1 += (w * unit) * x;
  }
  scale *= radius;

  Eigen::JacobiSVD<MatrixXcd> svd(a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > options.rank_tolerance * scale) ++rank;
  if (rank == 0) return {};
  if (rank == ell)
    throw RankError("moment matrix has full rank " + std::to_string(ell) + "; increase max_rank");
  if (sv[rank] > 1e-6 * sv[rank - 1])
    throw RankError("moment singular values show no clear gap; increase max_rank or n_quad");

  const MatrixXcd u = svd.matrixU().leftCols(rank);
  const MatrixXcd v = svd.matrixV().leftCols(rank);
  const VectorXd inv_s = sv.head(rank).cwiseInverse();
  const MatrixXcd b = u.adjoint() * a1 * v * inv_s.cast<cplx>().asDiagonal();
  Eigen::ComplexEigenSolver<MatrixXcd> es(b);

  std::vector<ResonanceResult> roots;
  for (Eigen::Index m = 0; m < rank; ++m) {
    const cplx raw = center + radius * es.eigenvalues()[m];
    VectorXcd y = u * es.eigenvectors().col(m);
    const Refined r = refine_root(domain, eps, raw, y, {});
    if (std::abs(r.kappa - center) >= radius) continue;
    ResonanceResult out;
    out.kappa = r.kappa;
    out.kappa_sq = r.kappa * r.kappa;
    out.seed_lambda = 1.0 / std::real(center * center);
    out.kernel_vector = to_cells(domain, r.y, nullptr);
    out.residual = r.residual;
    out.method = SolverMethod::contour;
    out.epsilon = eps;
    out.unpolished_kappa = raw;
    out.iterations = r.iterations;
    check_sheet(out);
    roots.push_back(std::move(out));
  }
  return merge(std::move(roots));
}

double contour_radius_for(const SpectralData& spectral, std::size_t cluster_index) {
  const auto& clusters = spectral.clusters;
  if (cluster_index >= clusters.size()) throw PreconditionError("cluster index out of range");
  const double k = 1.0 / std::sqrt(clusters[cluster_index].lambda);
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (c == cluster_index || clusters[c].lambda <= 0.0) continue;
    nearest = std::min(nearest, std::abs(1.0 / std::sqrt(clusters[c].lambda) - k));
  }
  return std::min(0.25 * k, 0.45 * nearest);
}

std::vector<ResonanceResult> resonance_set(const DiscreteDomain& domain, const SpectralData& spectral,
                                           double eps, double r, const ContourOptions& options) {
  const LocalizationConstants constants = localization_constants(spectral, domain, r);
  std::vector<std::size_t> selected;
  for (std::size_t c = 0; c < spectral.clusters.size(); ++c) {
    const double lambda = spectral.clusters[c].lambda;
    if (lambda >= spectral.trust_threshold() && 1.0 / lambda <= constants.r_plus) selected.push_back(c);
  }

  std::vector<std::vector<ResonanceResult>> found(selected.size());
  std::vector<std::exception_ptr> failures(selected.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t s = 0; s < selected.size(); ++s) {
    try {
      const std::size_t c = selected[s];
      const double k = 1.0 / std::sqrt(spectral.clusters[c].lambda);
      ContourOptions opts = options;
      opts.max_rank = std::max<int>(opts.max_rank, static_cast<int>(spectral.clusters[c].multiplicity()) + 2);
      found[s] = contour_solver(domain, eps, cplx(k, 0.0), contour_radius_for(spectral, c), opts);
      for (auto& res : found[s]) res.seed_lambda = spectral.clusters[c].lambda;
    } catch (...) {
      failures[s] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<ResonanceResult> all;
  for (auto& group : found)
    for (auto& res : group)
      if (std::abs(res.kappa_sq) < constants.r_plus) all.push_back(std::move(res));
  return merge(std::move(all));
}

int count_with_multiplicity(const std::vector<ResonanceResult>& results) {
  int total = 0;
  for (const auto& r : results) total += r.multiplicity;
  return total;
}

std::string resonances_csv(const std::vector<ResonanceResult>& results) {
  std::string out =
      "epsilon,seed_lambda,re_kappa,im_kappa,re_kappa_sq,im_kappa_sq,multiplicity,residual,method\n";
  for (const auto& r : results) {
    out += io::fmt(r.epsilon) + ',' + io::fmt(r.seed_lambda) + ',' + io::fmt(r.kappa.real()) + ',' +
           io::fmt(r.kappa.imag()) + ',' + io::fmt(r.kappa_sq.real()) + ',' + io::fmt(r.kappa_sq.imag()) +
           ',' + std::to_string(r.multiplicity) + ',' + io::fmt(r.residual) + ',' + to_string(r.method) + '\n';
  }
  return out;
}

}  // namespace subres
