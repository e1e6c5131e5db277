#include "subres/errors.hpp"
#include "subres/field.hpp"
#include "subres/kernel.hpp"
#include "subres/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace subres;

namespace {

const DiscreteDomain& ball5() {
  static const DiscreteDomain d = make_ball(1.0, 5);
  return d;
}

ScatterScenario scenario(double eps, cplx kappa, std::vector<Vec3> obs = {Vec3(0.0, 3.0, 0.0)}) {
  ScatterScenario sc;
  sc.domain = &ball5();
  sc.epsilon = eps;
  sc.kappa = kappa;
  sc.observations = std::move(obs);
  return sc;
}

// Lippmann-Schwinger on the physical cells:
//   u = G(. - x_s) + kappa^2 (eps^-2 - 1) N^phys u,  u_s(x) = kappa^2 (eps^-2 - 1) sum G(x - y_i) u_i V_i.
cplx ls_scattered(const ScatterScenario& sc, const Vec3& x) {
  const DiscreteDomain phys = scaled_domain(*sc.domain, sc.epsilon);
  const KernelOperator n = assemble_newton(phys, sc.kappa);
  const cplx q = sc.kappa * sc.kappa * (1.0 / (sc.epsilon * sc.epsilon) - 1.0);
  const Eigen::Index m = n.n();
  Eigen::VectorXcd g(m);
  for (Eigen::Index i = 0; i < m; ++i) g[i] = kernel::green(sc.kappa, (phys[i].center - sc.source).norm());
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m) - q * n.entries;
  const Eigen::VectorXcd u = a.fullPivLu().solve(g);
  cplx out = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) out += kernel::green(sc.kappa, (x - phys[i].center).norm()) * u[i] * phys[i].volume;
  return q * out;
}

}  // namespace

TEST_CASE("zero frequency and unit contrast give no scattering") {
  const auto g0 = interior_density(scenario(0.05, 0.0));
  CHECK(g0.norm() == 0.0);
  const auto f1 = scattered_field(scenario(1.0, 1.3));
  CHECK(f1.scattered[0] == cplx(0.0, 0.0));
  CHECK(std::abs(f1.total[0] - kernel::green(1.3, (Vec3(0.0, 3.0, 0.0) - Vec3(2.0, 0.0, 0.0)).norm())) < 1e-15);
}

TEST_CASE("physical system is eps^2 times the reference characteristic matrix") {
  const double eps = 0.05;
  const cplx kappa(1.4, -0.02);
  const Eigen::MatrixXcd phys = physical_characteristic(scaled_domain(ball5(), eps), kappa, eps);
  const Eigen::MatrixXcd ref = weighted_form::characteristic(ball5(), kappa, eps);
  CHECK((phys - eps * eps * ref).norm() <= 1e-10 * (eps * eps * ref).norm());
}

TEST_CASE("scattered field matches an independent Lippmann-Schwinger solve") {
  REQUIRE(ball5().size() <= 200);
  for (double eps : {0.05, 0.3}) {
    for (cplx kappa : {cplx(1.0, 0.0), cplx(1.5, 0.0), cplx(2.0, 0.0)}) {
      const ScatterScenario sc = scenario(eps, kappa, {Vec3(0.0, 3.0, 0.0), Vec3(-1.0, 0.5, 2.0)});
      const FieldValues f = scattered_field(sc);
      for (std::size_t j = 0; j < sc.observations.size(); ++j) {
        const cplx ref = ls_scattered(sc, sc.observations[j]);
        CHECK(std::abs(f.scattered[j] - ref) <= 1e-8 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("reciprocity and far-field decay") {
  ScatterScenario a = scenario(0.1, 1.5, {Vec3(0.0, 3.0, 0.0)});
  a.source = Vec3(2.0, 0.0, 1.0);
  ScatterScenario b = scenario(0.1, 1.5, {Vec3(2.0, 0.0, 1.0)});
  b.source = Vec3(0.0, 3.0, 0.0);
  const cplx ua = scattered_field(a).scattered[0], ub = scattered_field(b).scattered[0];
  CHECK(std::abs(ua - ub) <= 1e-10 * std::abs(ua));

  const ScatterScenario far = scenario(0.1, 1.5, {Vec3(0.0, 50.0, 0.0), Vec3(0.0, 100.0, 0.0)});
  const FieldValues f = scattered_field(far);
  const double ratio = (100.0 * std::abs(f.scattered[1])) / (50.0 * std::abs(f.scattered[0]));
  CHECK(std::abs(ratio - 1.0) < 0.05);
}

TEST_CASE("scenario preconditions") {
  CHECK_THROWS_AS(scattered_field(scenario(0.5, 1.0, {Vec3(0.1, 0.0, 0.0)})), GeometryError);
  ScatterScenario inside = scenario(0.5, 1.0);
  inside.source = Vec3(0.0, 0.0, 0.2);
  CHECK_THROWS_AS(scattered_field(inside), GeometryError);
  CHECK_THROWS_AS(scattered_field(scenario(0.0, 1.0)), ConfigError);
  CHECK_THROWS_AS(scattered_field(scenario(1.5, 1.0)), ConfigError);
  ScatterScenario near = scenario(0.05, 1.2);
  near.known_resonances_sq = {cplx(1.44, 1e-8)};
  CHECK_THROWS_AS(scattered_field(near), ResonanceProximityError);
}

TEST_CASE("frequency sweep: amplification near the ground resonance") {
  const SpectralData s = eig_newton0(ball5());
  const double k1 = 1.0 / s.lambda1();
  const ScatterScenario sc = scenario(0.05, 1.0);
  const SweepResult at = frequency_sweep(sc, {k1});
  const SweepResult below = frequency_sweep(sc, {0.5 * k1});
  CHECK(at.field_abs[0] > 5.0 * below.field_abs[0]);
  CHECK(at.minv_norm[0] > 5.0 * below.minv_norm[0]);
  CHECK(at.field_peaks.empty());

  CHECK_THROWS_AS(frequency_sweep(sc, {}), ConfigError);
  CHECK_THROWS_AS(frequency_sweep(sc, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(frequency_sweep(sc, {2.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(frequency_sweep(scenario(0.05, 1.0, {}), {1.0}), ConfigError);
}

TEST_CASE("frequency sweep: peak sharpens as eps decreases") {
  const SpectralData s = eig_newton0(ball5());
  const double k1 = 1.0 / s.lambda1();
  std::vector<double> grid;
  for (int i = 0; i < 41; ++i) grid.push_back(k1 * (0.5 + 1.0 * i / 40.0));
  auto contrast = [&](double eps) {
    const SweepResult r = frequency_sweep(scenario(eps, 1.0), grid);
    REQUIRE_FALSE(r.minv_peaks.empty());
    const double lo = *std::min_element(r.minv_norm.begin(), r.minv_norm.end());
    return r.minv_peaks.front().value / lo;
  };
  const double sharp = contrast(0.05), broad = contrast(0.4);
  CHECK(sharp > broad);

  const SweepResult r = frequency_sweep(scenario(0.05, 1.0), grid);
  REQUIRE_FALSE(r.field_peaks.empty());
  CHECK(std::abs(r.field_peaks.front().kappa_sq - k1) < 0.1 * k1);
  CHECK(sweep_csv(r).rfind("kappa_sq,response_field_abs,response_minv_norm\n", 0) == 0);
}

TEST_CASE("local maxima") {
  const std::vector<double> g{0, 1, 2, 3, 4, 5, 6};
  const std::vector<double> v{0, 2, 1, 1, 5, 1, 3};
  const auto p = local_maxima(g, v);
  REQUIRE(p.size() == 2);
  CHECK(p[0].kappa_sq == 4.0);
  CHECK(p[1].kappa_sq == 1.0);
  CHECK(local_maxima({0, 1, 2}, {1, 1, 1}).empty());
  CHECK(local_maxima({0}, {1}).empty());
}
