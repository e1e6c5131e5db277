#include "subres/asymptotics.hpp"
#include "subres/errors.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace subres;

namespace {

constexpr double kPi = std::numbers::pi;

struct Ball {
  DiscreteDomain domain;
  SpectralData spectral;
  explicit Ball(int res) : domain(make_ball(1.0, res)), spectral(eig_newton0(domain)) {}
};

const Ball& ball8() {
  static const Ball b(8);
  return b;
}

// Synthetic spectral data with an explicit spectrum and eigenvectors.
SpectralData synthetic(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors, const Eigen::VectorXd& weights) {
  SpectralData s;
  s.eigenvalues = values;
  s.eigenvectors = vectors;
  s.weights = weights;
  s.clusters = cluster_values(values, 1e-2);
  return s;
}

}  // namespace

TEST_CASE("M_kappa(0)^{-1} bound: examples") {
  const SpectralData& s = ball8().spectral;
  const BoundSample at0 = mk0_inverse_bound(s, 0.0);
  CHECK(at0.lhs == doctest::Approx(1.0));
  CHECK(at0.rhs == doctest::Approx(std::numbers::sqrt2));

  const cplx k2 = cplx(1.0, 1.0) / s.lambda1();
  const BoundSample diag = mk0_inverse_bound(s, std::sqrt(k2));
  CHECK(diag.lhs <= std::numbers::sqrt2);
  CHECK(diag.holds());

  const double mid = 0.5 * (1.0 / s.eigenvalues[0] + 1.0 / s.clusters[1].lambda);
  const BoundSample between = mk0_inverse_bound(s, std::sqrt(mid));
  const double t1 = 1.0 / std::abs(1.0 - mid * s.eigenvalues[0]);
  const double t2 = 1.0 / std::abs(1.0 - mid * s.clusters[1].lambda);
  CHECK(between.lhs == doctest::Approx(std::max(t1, t2)).epsilon(1e-6));

  CHECK_THROWS_AS(mk0_inverse_bound(s, 1.0 / std::sqrt(s.lambda1())), PreconditionError);
}

TEST_CASE("M_kappa(0)^{-1} bound: quasi-random samples") {
  for (const SpectralData& s : {ball8().spectral, eig_newton0(make_box(Vec3(1.0, 2.0, 0.5), 4))}) {
    const auto samples = mk0_bound_samples(s, 200, 7);
    REQUIRE(samples.size() == 200);
    for (const auto& b : samples) {
      CHECK(std::abs(b.kappa_sq) <= 2.0 / s.lambda1() + 1e-12);
      // Half-plane part of the estimate: sqrt(2) when Re kappa^2 <= |Im kappa^2|.
      if (b.kappa_sq.real() <= std::abs(b.kappa_sq.imag())) CHECK(b.lhs <= std::numbers::sqrt2);
      // Any bound on the spectral resolvent is at least the largest-mode ratio.
      CHECK(b.lhs > 0.0);
    }
  }
  const auto a = mk0_bound_samples(ball8().spectral, 5, 3), b = mk0_bound_samples(ball8().spectral, 5, 3);
  for (int i = 0; i < 5; ++i) CHECK(a[i].kappa_sq == b[i].kappa_sq);
}

TEST_CASE("M_kappa(0)^{-1} bound: failure away from the spectrum") {
  // kappa^2 = 2i/lambda_1: dist = sqrt(5)/lambda_1, so rhs = sqrt(2/5), while
  // mu/|mu - kappa^2| tends to 1 along the spectrum.
  const SpectralData& s = ball8().spectral;
  const BoundSample b = mk0_inverse_bound(s, std::sqrt(cplx(0.0, 2.0 / s.lambda1())));
  CHECK(b.rhs == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
  CHECK(b.lhs > 0.9);
  CHECK_FALSE(b.holds());
}

TEST_CASE("localization constants: arithmetic example") {
  const auto c = localization_constants({0.4, 0.1}, 1.0, 2.0, 3.0);
  CHECK(c.r_circ == doctest::Approx(3.75));
  CHECK(c.r_plus == doctest::Approx(6.75));
  const double sr = std::sqrt(6.75);
  const double c_r = std::sqrt(2.0) * (std::sqrt(1.0 / (4.0 * kPi)) * sr * std::exp(sr * 2.0) + 0.4) * 6.75 * 6.75;
  CHECK(c.c_r == doctest::Approx(c_r).epsilon(1e-14));
  CHECK(c.eps_max == doctest::Approx(3.75 / c_r).epsilon(1e-14));
  CHECK_THROWS_AS(localization_constants({0.4, 0.1}, 1.0, 2.0, 2.5), PreconditionError);
  CHECK_THROWS_AS(localization_constants({0.4}, 1.0, 2.0, 3.0), DomainError);
}

TEST_CASE("localization constants on the ball mesh") {
  const auto& b = ball8();
  const auto c = localization_constants(b.spectral, b.domain, 1.2 / b.spectral.lambda1());
  CHECK(std::isfinite(c.c_r));
  CHECK(c.eps_max > 0.0);
  CHECK(c.c_r > 1.0 / kPi);
  CHECK(c.volume == b.domain.total_volume());
  CHECK(c.diameter == 2.0);
}

TEST_CASE("localization check") {
  const auto& b = ball8();
  const auto c = localization_constants(b.spectral, b.domain, 1.2 / b.spectral.lambda1());
  CHECK_THROWS_AS(check_localization({}, c, 2.0 * c.eps_max), HypothesisNotMet);

  const ResonanceResult at0 = track_resonance(b.domain, 0.0, seed_from(b.spectral, 0));
  const auto r0 = check_localization({at0}, c, 0.0);
  REQUIRE(r0.entries.size() == 1);
  CHECK(r0.all_pass());
  CHECK(r0.entries[0].distance < 1e-10);

  const double eps = std::min(0.05, 0.4 * c.eps_max);
  const ResonanceResult r = track_resonance(b.domain, eps, seed_from(b.spectral, 0));
  const auto rep = check_localization({r}, c, eps);
  CHECK(rep.all_pass());
  CHECK(rep.entries[0].distance <= c.c_r * eps);
  CHECK(rep.entries[0].assigned_lambda == doctest::Approx(b.spectral.lambda1()));

  ResonanceResult planted = r;
  planted.kappa_sq = 1.0 / b.spectral.lambda1() + 1.5 * c.c_r * eps;
  const auto bad = check_localization({planted}, c, eps);
  REQUIRE(bad.entries.size() == 1);
  CHECK_FALSE(bad.all_pass());
  CHECK(bad.entries[0].discs_containing == 0);
}

TEST_CASE("first-order prediction: ground mode and parity") {
  const double analytic = testutil::ball_ground_first_coeff();
  CHECK(analytic == doctest::Approx(kPi).epsilon(1e-8));
  const Ball b12(12);
  const auto ground = predict_first_order(b12.spectral, 0);
  REQUIRE(ground.size() == 1);
  CHECK(ground[0].first_coeff.real() == 0.0);
  CHECK(ground[0].first_coeff.imag() < 0.0);
  CHECK(std::abs(-ground[0].first_coeff.imag() - analytic) / analytic < 0.05);
  CHECK(ground[0].zeroth == doctest::Approx(1.0 / b12.spectral.lambda1()));

  const auto odd = predict_first_order(b12.spectral, 1);
  REQUIRE(odd.size() == 3);
  for (const auto& p : odd) CHECK(std::abs(p.first_coeff) < 1e-10);
}

TEST_CASE("first-order prediction: homogeneity and cluster gauge") {
  // Two weights, orthonormal vectors: a simple mode and a 2-fold cluster.
  Eigen::VectorXd w(3);
  w << 1.0, 1.0, 1.0;
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd values(3);
  values << 0.5, 0.2, 0.2;
  const SpectralData s = synthetic(values, e, w);
  REQUIRE(s.clusters.size() == 2);
  const auto p = predict_first_order(s, 0);

  Eigen::VectorXd scaled = values * 2.0;
  const auto q = predict_first_order(synthetic(scaled, e, w), 0);
  CHECK(q[0].first_coeff.imag() == doctest::Approx(p[0].first_coeff.imag() * std::pow(2.0, -2.5)));

  const auto cl = predict_first_order(s, 1);
  REQUIRE(cl.size() == 2);
  CHECK(cl[0].cluster_summed);
  CHECK(cl[0].coupling_sq == doctest::Approx(2.0));
  CHECK(cl[1].coupling_sq < 1e-28);
  CHECK(std::abs(cl[0].gauge_vector.dot(cl[1].gauge_vector)) < 1e-14);
  CHECK_THROWS_AS(predict_first_order(s, 5), PreconditionError);
}

TEST_CASE("expansion fit") {
  const cplx a(2.5, 0.0), bcoef(0.0, -0.3), c(0.7, 0.2);
  std::vector<std::pair<double, cplx>> lin, quad;
  for (double eps : {0.01, 0.02, 0.04}) {
    lin.emplace_back(eps, a + bcoef * eps);
    quad.emplace_back(eps, a + bcoef * eps + c * eps * eps);
  }
  const ExpansionFit fl = fit_expansion(lin);
  CHECK(std::abs(fl.zeroth_fit - a) < 1e-12);
  CHECK(std::abs(fl.first_fit - bcoef) < 1e-12);
  CHECK(fl.remainder_order == 0.0);

  const ExpansionFit fq = fit_expansion(quad);
  CHECK(std::abs(fq.remainder_order - 2.0) < 0.2);
  CHECK(std::abs(fq.second_fit - c) < 1e-8);

  // With a cubic term and four samples the order stays near 2.
  std::vector<std::pair<double, cplx>> cubic;
  for (double eps : {0.005, 0.01, 0.02, 0.04}) cubic.emplace_back(eps, a + bcoef * eps + c * eps * eps + 3.0 * eps * eps * eps);
  CHECK(std::abs(fit_expansion(cubic).remainder_order - 2.0) < 0.3);

  CHECK_THROWS_AS(fit_expansion({{0.01, a}, {0.02, a}}), ConfigError);
  CHECK_THROWS_AS(fit_expansion({{0.01, a}, {0.01, a}, {0.02, a}}), ConfigError);
  CHECK_THROWS_AS(fit_expansion(quad, 0.03), PreconditionError);
}

TEST_CASE("default eps grid") {
  const auto g = default_eps_grid(1.0);
  REQUIRE(g.size() == 3);
  CHECK(g[2] == 0.04);
  CHECK(g[0] == 0.01);
  CHECK(default_eps_grid(0.01)[2] == doctest::Approx(0.005));
  CHECK_THROWS_AS(default_eps_grid(0.0), PreconditionError);
}

TEST_CASE("tracked ground resonances: fit against prediction") {
  const auto& b = ball8();
  std::vector<std::pair<double, cplx>> samples;
  for (double eps : {0.01, 0.02, 0.04})
    samples.emplace_back(eps, track_resonance(b.domain, eps, seed_from(b.spectral, 0)).kappa_sq);
  const ExpansionFit fit = fit_expansion(samples);
  const cplx pred = predict_first_order(b.spectral, 0)[0].first_coeff;
  CHECK(std::abs(fit.first_fit - pred) / std::abs(pred) < 0.05);
  CHECK(std::abs(fit.zeroth_fit - 1.0 / b.spectral.lambda1()) < 1e-4);
  for (const auto& [eps, k2] : samples) CHECK(k2.imag() < 0.0);
}
