#include "subres/linalg.hpp"

#include "subres/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace subres::linalg {

namespace {

Eigen::VectorXcd unit_start(Eigen::Index n) {
  // Deterministic, non-symmetric start vector.
  Eigen::VectorXcd v(n);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

void reorthogonalize(Eigen::VectorXcd& x, const std::vector<Eigen::VectorXcd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) x -= b.dot(x) * b;
}

}  // namespace

double largest_singular_value(const ApplyFn& apply, const ApplyFn& apply_adjoint, Eigen::Index n) {
  if (n == 0) return 0.0;
  const int max_steps = static_cast<int>(std::min<Eigen::Index>(n, 200));
  std::vector<Eigen::VectorXcd> vs{unit_start(n)};
  std::vector<Eigen::VectorXcd> us;
  std::vector<double> alpha, beta;
  double prev = -1.0;
  double sigma = 0.0;
  for (int k = 0; k < max_steps; ++k) {
    Eigen::VectorXcd u = apply(vs.back());
    reorthogonalize(u, us);
    const double a = u.norm();
    alpha.push_back(a);
    if (a > 0) u /= a;
    us.push_back(u);

    Eigen::VectorXcd w = apply_adjoint(u);
    reorthogonalize(w, vs);
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd bidiag = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      bidiag(i, i) = alpha[i];
      if (i + 1 < m) bidiag(i, i + 1) = beta[i];
    }
    sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(bidiag).singularValues()(0);
    const bool invariant = b <= 1e-14 * std::max(sigma, 1e-300);
    if (invariant || (prev >= 0 && std::abs(sigma - prev) <= 1e-15 * sigma && k >= 3)) break;
    prev = sigma;
    beta.push_back(b);
    vs.push_back(w / b);
  }
  return sigma;
}

double largest_singular_value(const Eigen::MatrixXcd& a) {
  if (a.rows() <= 64) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0);
  }
  return largest_singular_value([&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return a * x; },
                                [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return a.adjoint() * x; },
                                a.cols());
}

double inverse_norm(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  return largest_singular_value(
      [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return lu.solve(x); },
      [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return lu.adjoint().solve(x); }, lu.rows());
}

namespace {

// Spot check of a few eigenpairs and their mutual orthogonality.
bool plausible(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Eigen::MatrixXd& v) {
  const Eigen::Index n = a.rows();
  const double scale = std::max(1e-300, w.cwiseAbs().maxCoeff());
  const Eigen::Index picks[] = {0, n / 3, (2 * n) / 3, n - 1};
  for (Eigen::Index k : picks) {
    if ((a * v.col(k) - w[k] * v.col(k)).norm() > 1e-9 * scale) return false;
    for (Eigen::Index j : picks)
      if (std::abs(v.col(k).dot(v.col(j)) - (j == k ? 1.0 : 0.0)) > 1e-9) return false;
  }
  return true;
}

}  // namespace

SymmetricEigen symmetric_eig(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  SymmetricEigen out;
  if (n == 0) return out;
  Eigen::MatrixXd v = a;
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), v.data(),
                     static_cast<lapack_int>(n), w.data());
  if (info == 0 && plausible(a, w, v)) {
    out.values = w.reverse();
    out.vectors = v.rowwise().reverse();
    return out;
  }
  // Some OpenBLAS kernel selections return corrupted eigenvectors; Eigen's own
  // solver is slower but independent of the BLAS build.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge (n=" + std::to_string(n) + ")");
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

SymmetricEigen partial_symmetric_eig(const BlockApplyFn& apply, Eigen::Index n,
                                     const PartialEigOptions& options) {
  const int count = options.count;
  const int block = options.block > 0 ? options.block : count + 4;
  const int max_basis = static_cast<int>(
      std::min<Eigen::Index>(n, options.max_basis > 0 ? options.max_basis : 12 * block));
  if (count <= 0 || count > n) throw ConfigError("partial eigensolver: bad eigenpair count");
  if (block > max_basis) throw ConfigError("partial eigensolver: block larger than basis");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = g(rng);
  x = Eigen::HouseholderQR<Eigen::MatrixXd>(x).householderQ() * Eigen::MatrixXd::Identity(n, block);

  SymmetricEigen result;
  double worst = 0.0;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    Eigen::MatrixXd q(n, max_basis), aq(n, max_basis);
    Eigen::Index used = x.cols();
    q.leftCols(used) = x;
    aq.leftCols(used) = apply(x);
    Eigen::Index last = 0;
    while (used < max_basis) {
      const Eigen::Index width = std::min<Eigen::Index>(used - last, max_basis - used);
      Eigen::MatrixXd r = aq.middleCols(last, width);
      for (int pass = 0; pass < 2; ++pass) r -= q.leftCols(used) * (q.leftCols(used).transpose() * r);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(r);
      const double scale = std::max(1e-300, std::abs(qr.matrixQR()(0, 0)));
      qr.setThreshold(1e-10);
      const Eigen::Index rank = std::min<Eigen::Index>(qr.rank(), width);
      if (rank == 0 || scale < 1e-14 * aq.leftCols(used).norm()) break;
      Eigen::MatrixXd fresh = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
      for (int pass = 0; pass < 2; ++pass)
        fresh -= q.leftCols(used) * (q.leftCols(used).transpose() * fresh);
      fresh = Eigen::HouseholderQR<Eigen::MatrixXd>(fresh).householderQ() * Eigen::MatrixXd::Identity(n, rank);
      last = used;
      q.middleCols(used, rank) = fresh;
      aq.middleCols(used, rank) = apply(fresh);
      used += rank;
    }
    Eigen::MatrixXd h = q.leftCols(used).transpose() * aq.leftCols(used);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    const Eigen::Index keep = std::min<Eigen::Index>(used, std::max(block, count));
    Eigen::MatrixXd z = small.eigenvectors().rightCols(keep).rowwise().reverse();
    Eigen::VectorXd theta = small.eigenvalues().tail(keep).reverse();
    Eigen::MatrixXd y = q.leftCols(used) * z;
    Eigen::MatrixXd ay = aq.leftCols(used) * z;
    worst = 0.0;
    for (int j = 0; j < count; ++j)
      worst = std::max(worst, (ay.col(j) - theta[j] * y.col(j)).norm());
    result.values = theta.head(count);
    result.vectors = y.leftCols(count);
    if (worst <= options.rel_tol * std::abs(theta[0])) return result;
    x = y.leftCols(std::min<Eigen::Index>(block, keep));
  }
  throw NumericalError("partial eigensolver did not converge (residual " + std::to_string(worst) + ")");
}

}  // namespace subres::linalg
