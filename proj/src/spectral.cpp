#include "subres/spectral.hpp"

#include "subres/errors.hpp"
#include "subres/io.hpp"
#include "subres/lattice_operator.hpp"
#include "subres/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace subres {

namespace {

// Weighted eigenvectors y -> cell values e = D^{-1/2} y, with a deterministic
// sign: positive coupling, or positive largest entry when the coupling vanishes.
SpectralData finish(linalg::SymmetricEigen eig, const Eigen::VectorXd& weights, std::string mesh_id,
                    bool complete, double cluster_tol) {
  SpectralData s;
  s.weights = weights;
  s.mesh_id = std::move(mesh_id);
  s.complete = complete;
  s.eigenvalues = eig.values.cwiseMax(0.0);
  const Eigen::VectorXd root = weights.cwiseSqrt();
  const double couple_floor = 1e-12 * std::sqrt(weights.sum());
  for (Eigen::Index j = 0; j < eig.vectors.cols(); ++j) {
    auto y = eig.vectors.col(j);
    const double c = root.dot(y);
    double sign = c < 0 ? -1.0 : 1.0;
    if (std::abs(c) <= couple_floor) {
      Eigen::Index arg;
      y.cwiseAbs().maxCoeff(&arg);
      sign = y[arg] < 0 ? -1.0 : 1.0;
    }
    y *= sign;
  }
  s.eigenvectors = root.cwiseInverse().asDiagonal() * eig.vectors;
  s.clusters = cluster(s, cluster_tol);
  return s;
}

}  // namespace

std::vector<Cluster> SpectralData::trusted_clusters() const {
  std::vector<Cluster> out;
  for (const Cluster& c : clusters)
    if (c.lambda >= trust_threshold()) out.push_back(c);
  return out;
}

int SpectralData::cluster_of(Eigen::Index j) const {
  for (std::size_t c = 0; c < clusters.size(); ++c)
    if (j >= clusters[c].begin && j < clusters[c].end) return static_cast<int>(c);
  return -1;
}

SpectralData eig_newton0(const KernelOperator& op, double cluster_tol) {
  if (op.kind != OperatorKind::newton || op.kappa != cplx(0.0, 0.0))
    throw PreconditionError("eig_newton0 needs a newton(0) operator");
  Eigen::MatrixXd w = op.weighted().real();
  w = 0.5 * (w + w.transpose()).eval();
  return finish(linalg::symmetric_eig(std::move(w)), op.weights, "operator(n=" + std::to_string(op.n()) + ")",
                true, cluster_tol);
}

SpectralData eig_newton0(const DiscreteDomain& domain, double cluster_tol) {
  Eigen::MatrixXd w = weighted_form::newton(domain, 0.0).real();
  return finish(linalg::symmetric_eig(std::move(w)), domain.volumes(), domain.describe(), true, cluster_tol);
}

SpectralData eig_newton0_partial(const DiscreteDomain& domain, int count, double cluster_tol) {
  const LatticeNewtonOperator op(domain);
  linalg::PartialEigOptions options;
  options.count = count;
  auto eig = linalg::partial_symmetric_eig([&](const Eigen::MatrixXd& x) { return op.apply(x); },
                                           op.size(), options);
  return finish(std::move(eig), domain.volumes(), domain.describe(), false, cluster_tol);
}

std::vector<Cluster> cluster_values(const Eigen::VectorXd& values, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 0.1)) throw PreconditionError("cluster tolerance must lie in (0, 0.1)");
  std::vector<Cluster> out;
  Eigen::Index i = 0;
  const Eigen::Index n = values.size();
  while (i < n && values[i] > 0.0) {
    Cluster c;
    c.begin = i;
    Eigen::Index j = i + 1;
    while (j < n && values[j] > 0.0 && values[j - 1] - values[j] < rel_tol * values[j - 1]) ++j;
    c.end = j;
    c.lambda = values.segment(c.begin, c.end - c.begin).mean();
    out.push_back(c);
    i = j;
  }
  return out;
}

std::vector<Cluster> cluster(const SpectralData& spectral, double rel_tol) {
  return cluster_values(spectral.eigenvalues, rel_tol);
}

cplx coupling(const SpectralData& spectral, Eigen::Index j) {
  if (j < 0 || j >= spectral.eigenvectors.cols()) throw PreconditionError("coupling: mode index out of range");
  return spectral.weights.dot(spectral.eigenvectors.col(j));
}

double ball_oracle_condition(int l, double k) {
  const auto ul = static_cast<unsigned>(l);
  // k j_l' = l j_l - k j_{l+1}
  return (2.0 * l + 1.0) * std::sph_bessel(ul, k) - k * std::sph_bessel(ul + 1, k);
}

std::vector<BallOracleEigenvalue> ball_oracle(int l_max, int n_max) {
  if (l_max < 0 || n_max < 1 || l_max > 20 || n_max > 20)
    throw PreconditionError("ball oracle needs 0 <= l_max <= 20 and 1 <= n_max <= 20");
  std::vector<std::vector<BallOracleEigenvalue>> per_l(static_cast<std::size_t>(l_max) + 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (int l = 0; l <= l_max; ++l) {
    const double width = 0.25 * std::numbers::pi;
    const double upper = (n_max + l + 2) * std::numbers::pi;
    std::vector<double> roots;
    double a = 1e-3 * width;
    double ga = ball_oracle_condition(l, a);
    for (double b = width; b <= upper + 1e-12 && static_cast<int>(roots.size()) < n_max; b += width) {
      const double gb = ball_oracle_condition(l, b);
      double root = -1.0;
      if (gb == 0.0) {
        root = b;
      } else if ((ga < 0) != (gb < 0) && ga != 0.0) {
        double lo = a, hi = b, glo = ga;
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = ball_oracle_condition(l, mid);
          if (gm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        root = 0.5 * (lo + hi);
      }
      if (root > 0 && (roots.empty() || std::abs(root - roots.back()) > 1e-9 * root)) roots.push_back(root);
      a = b;
      ga = gb;
    }
    auto& out = per_l[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < roots.size(); ++i)
      out.push_back({l, static_cast<int>(i) + 1, roots[i], 1.0 / (roots[i] * roots[i]), 2 * l + 1});
  }
  std::vector<BallOracleEigenvalue> all;
  for (int l = 0; l <= l_max; ++l) {
    const auto& v = per_l[static_cast<std::size_t>(l)];
    if (static_cast<int>(v.size()) < n_max)
      throw OracleError("ball oracle: bracket search found only " + std::to_string(v.size()) +
                        " roots for l=" + std::to_string(l));
    all.insert(all.end(), v.begin(), v.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.lambda > y.lambda; });
  return all;
}

std::string spectrum_csv(const SpectralData& spectral) {
  std::string out = "index,lambda,cluster_id,coupling_re,coupling_im\n";
  for (Eigen::Index j = 0; j < spectral.eigenvalues.size(); ++j) {
    const cplx c = coupling(spectral, j);
    out += std::to_string(j) + ',' + io::fmt(spectral.eigenvalues[j]) + ',' +
           std::to_string(spectral.cluster_of(j)) + ',' + io::fmt(c.real()) + ',' + io::fmt(c.imag()) + '\n';
  }
  return out;
}

std::string oracle_csv(const std::vector<BallOracleEigenvalue>& oracle) {
  std::string out = "l,n,k_root,lambda,multiplicity\n";
  for (const auto& o : oracle)
    out += std::to_string(o.l) + ',' + std::to_string(o.n) + ',' + io::fmt(o.k_root) + ',' + io::fmt(o.lambda) +
           ',' + std::to_string(o.multiplicity) + '\n';
  return out;
}

}  // namespace subres
