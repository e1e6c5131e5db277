#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>

namespace testutil {

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Unit-ball ground mode j0(pi r / 2), normalized in L2(B): returns <1, e>^2.
inline double ball_ground_coupling_sq() {
  const double k = 0.5 * std::numbers::pi;
  auto j0 = [k](double r) { return r == 0.0 ? 1.0 : std::sin(k * r) / (k * r); };
  const double mass = 4.0 * std::numbers::pi * simpson([&](double r) { return j0(r) * r * r; }, 0.0, 1.0);
  const double norm_sq = 4.0 * std::numbers::pi * simpson([&](double r) { return j0(r) * j0(r) * r * r; }, 0.0, 1.0);
  return mass * mass / norm_sq;
}

inline double ball_ground_lambda() { return 4.0 / (std::numbers::pi * std::numbers::pi); }

// |first-order coefficient| = <1,e>^2 / (4 pi lambda^{5/2}) for the unit-ball ground mode.
inline double ball_ground_first_coeff() {
  return ball_ground_coupling_sq() / (4.0 * std::numbers::pi * std::pow(ball_ground_lambda(), 2.5));
}

#ifdef SUBRES_TEST_TMP
inline std::filesystem::path temp_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(SUBRES_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

#endif

}  // namespace testutil
