#include "subres/kernel.hpp"

#include <cmath>
#include <numbers>

namespace subres::kernel {

namespace {

constexpr double kInv4Pi = 0.25 * std::numbers::inv_pi;
constexpr cplx kI{0.0, 1.0};

// sum_{m>=0} (i kappa a)^m / (m! (m + p)) * a^p, converges fast for |kappa a| < 1.
cplx moment_series(cplx kappa, double a, int p) {
  const cplx x = kI * kappa * a;
  cplx term = 1.0;  // x^m / m!
  cplx sum = 1.0 / static_cast<double>(p);
  for (int m = 1; m < 40; ++m) {
    term *= x / static_cast<double>(m);
    const cplx add = term / static_cast<double>(m + p);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum * std::pow(a, p);
}

}  // namespace

cplx green(cplx kappa, double r) {
  return std::exp(kI * kappa * r) * (kInv4Pi / r);
}

cplx green_derivative(cplx kappa, double r) {
  return kI * kInv4Pi * std::exp(kI * kappa * r);
}

cplx ball_self_term(cplx kappa, double a) {
  if (std::abs(kappa * a) < 1.0) return moment_series(kappa, a, 2);
  const cplx e = std::exp(kI * kappa * a);
  return (e * (1.0 - kI * kappa * a) - 1.0) / (kappa * kappa);
}

cplx ball_self_term_derivative(cplx kappa, double a) {
  if (std::abs(kappa * a) < 1.0) return kI * moment_series(kappa, a, 3);
  const cplx e = std::exp(kI * kappa * a);
  const cplx k2 = kappa * kappa;
  const cplx primitive_a = e * (-kI * a * a / kappa + 2.0 * a / k2 + 2.0 * kI / (k2 * kappa));
  const cplx primitive_0 = 2.0 * kI / (k2 * kappa);
  return kI * (primitive_a - primitive_0);
}

}  // namespace subres::kernel
