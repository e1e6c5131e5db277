#include "subres/operators.hpp"

#include "subres/errors.hpp"
#include "subres/kernel.hpp"
#include "subres/linalg.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace subres {

namespace {

constexpr double kInv4Pi = 0.25 * std::numbers::inv_pi;
constexpr cplx kI{0.0, 1.0};

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
}

// Fills the weighted-form Newton matrix (and optionally its derivative).
void fill_weighted(const DiscreteDomain& domain, cplx z, Eigen::MatrixXcd& value,
                   Eigen::MatrixXcd* derivative) {
  const auto& cells = domain.cells();
  const Eigen::Index n = static_cast<Eigen::Index>(cells.size());
  value.resize(n, n);
  if (derivative) derivative->resize(n, n);
  Eigen::VectorXd root_v(n);
  for (Eigen::Index i = 0; i < n; ++i) root_v[i] = std::sqrt(cells[i].volume);

  bool degenerate = false;
#pragma omp parallel for schedule(dynamic, 16) reduction(|| : degenerate)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cell& ci = cells[i];
    value(i, i) = kernel::ball_self_term(z, ci.eq_radius);
    if (derivative) (*derivative)(i, i) = kernel::ball_self_term_derivative(z, ci.eq_radius);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Cell& cj = cells[j];
      const double r = (ci.center - cj.center).norm();
      if (r <= 1e-12 * (ci.eq_radius + cj.eq_radius)) {
        degenerate = true;
        continue;
      }
      const double w = root_v[i] * root_v[j];
      const cplx e = std::exp(kI * z * r);
      const cplx g = e * (w * kInv4Pi / r);
      value(i, j) = g;
      value(j, i) = g;
      if (derivative) {
        const cplx d = e * (kI * (w * kInv4Pi));
        (*derivative)(i, j) = d;
        (*derivative)(j, i) = d;
      }
    }
  }
  if (degenerate) throw AssemblyError("two cells have coincident centers (degenerate mesh)");
}

// A = D^{-1/2} S D^{1/2}.
Eigen::MatrixXcd unweight(const Eigen::MatrixXcd& s, const Eigen::VectorXd& volumes) {
  const Eigen::VectorXd root = volumes.cwiseSqrt();
  return root.cwiseInverse().asDiagonal() * s * root.asDiagonal();
}

}  // namespace

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::newton: return "newton";
    case OperatorKind::derivative: return "derivative";
    case OperatorKind::characteristic: return "characteristic";
  }
  return "?";
}

ContrastConfig::ContrastConfig(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("contrast epsilon must lie in (0, 1)");
}

Eigen::MatrixXcd KernelOperator::weighted() const {
  const Eigen::VectorXd root = weights.cwiseSqrt();
  return root.asDiagonal() * entries * root.cwiseInverse().asDiagonal();
}

namespace weighted_form {

Eigen::MatrixXcd newton(const DiscreteDomain& domain, cplx kappa) {
  Eigen::MatrixXcd s;
  fill_weighted(domain, kappa, s, nullptr);
  return s;
}

void newton_with_derivative(const DiscreteDomain& domain, cplx kappa, Eigen::MatrixXcd& value,
                            Eigen::MatrixXcd& derivative) {
  fill_weighted(domain, kappa, value, &derivative);
}

Eigen::MatrixXcd characteristic(const DiscreteDomain& domain, cplx kappa, double eps) {
  check_eps(eps);
  Eigen::MatrixXcd m = newton(domain, eps * kappa);
  m *= -(1.0 - eps * eps) * kappa * kappa;
  m.diagonal().array() += 1.0;
  return m;
}

void characteristic_with_derivative(const DiscreteDomain& domain, cplx kappa, double eps,
                                    Eigen::MatrixXcd& value, Eigen::MatrixXcd& derivative) {
  check_eps(eps);
  const double c = 1.0 - eps * eps;
  fill_weighted(domain, eps * kappa, value, &derivative);
  // value currently holds S, derivative holds S'.
  derivative *= -c * kappa * kappa * eps;
  derivative.noalias() += (-2.0 * c * kappa) * value;
  value *= -c * kappa * kappa;
  value.diagonal().array() += 1.0;
}

}  // namespace weighted_form

KernelOperator assemble_newton(const DiscreteDomain& domain, cplx kappa) {
  KernelOperator op;
  op.kind = OperatorKind::newton;
  op.kappa = kappa;
  op.weights = domain.volumes();
  op.entries = unweight(weighted_form::newton(domain, kappa), op.weights);
  return op;
}

KernelOperator assemble_derivative(const DiscreteDomain& domain, cplx kappa) {
  KernelOperator op;
  op.kind = OperatorKind::derivative;
  op.kappa = kappa;
  op.weights = domain.volumes();
  Eigen::MatrixXcd s, d;
  weighted_form::newton_with_derivative(domain, kappa, s, d);
  op.entries = unweight(d, op.weights);
  return op;
}

KernelOperator assemble_characteristic(const DiscreteDomain& domain, cplx kappa, double eps) {
  check_eps(eps);
  KernelOperator op;
  op.kind = OperatorKind::characteristic;
  op.kappa = kappa;
  op.epsilon = eps;
  op.weights = domain.volumes();
  op.entries = unweight(weighted_form::characteristic(domain, kappa, eps), op.weights);
  return op;
}

double weighted_norm(const KernelOperator& op) {
  return linalg::largest_singular_value(op.weighted());
}

double weighted_inner_norm(const Eigen::VectorXd& weights, const Eigen::VectorXcd& u) {
  return std::sqrt((weights.array() * u.array().abs2()).sum());
}

cplx weighted_dot(const Eigen::VectorXd& weights, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  return (weights.array().cast<cplx>() * u.array().conjugate() * v.array()).sum();
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get(std::istream& in) {
  std::uint64_t bits;
  if (!in.read(reinterpret_cast<char*>(&bits), 8)) throw ConfigError("operator dump truncated");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_operator_dump(const KernelOperator& op, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(op.n()));
  put<double>(out, op.kappa.real());
  put<double>(out, op.kappa.imag());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(op.kind));
  put<double>(out, op.epsilon);
  for (Eigen::Index i = 0; i < op.n(); ++i)
    for (Eigen::Index j = 0; j < op.n(); ++j) {
      put<double>(out, op.entries(i, j).real());
      put<double>(out, op.entries(i, j).imag());
    }
}

KernelOperator read_operator_dump(const std::filesystem::path& path, const Eigen::VectorXd& weights) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  KernelOperator op;
  const auto n = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const double re = get<double>(in);
  const double im = get<double>(in);
  op.kappa = {re, im};
  const auto tag = get<std::uint64_t>(in);
  if (tag > 2) throw ConfigError("operator dump has unknown kind tag");
  op.kind = static_cast<OperatorKind>(tag);
  op.epsilon = get<double>(in);
  if (weights.size() != n) throw ConfigError("operator dump size does not match weights");
  op.weights = weights;
  op.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = get<double>(in);
      const double b = get<double>(in);
      op.entries(i, j) = {a, b};
    }
  return op;
}

}  // namespace subres
