#include "subres/lattice_operator.hpp"

#include "subres/errors.hpp"
#include "subres/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>

namespace subres {

struct LatticeNewtonOperator::Plans {
  std::size_t real_size = 0;
  std::size_t spectral_size = 0;
  double* real = nullptr;
  fftw_complex* spectral = nullptr;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spectral);
  }
};

LatticeNewtonOperator::LatticeNewtonOperator(const DiscreteDomain& domain) : plans_(std::make_unique<Plans>()) {
  if (!domain.lattice()) throw ConfigError("lattice operator requires a lattice domain");
  const Lattice& lat = *domain.lattice();
  n_ = static_cast<Eigen::Index>(domain.size());
  const double volume = domain[0].volume;
  self_term_ = kernel::ball_self_term(0.0, domain[0].eq_radius).real();
  for (int k = 0; k < 3; ++k) padded_[k] = 2 * lat.dims[k];
  const auto [p0, p1, p2] = padded_;

  Plans& pl = *plans_;
  pl.real_size = static_cast<std::size_t>(p0) * p1 * p2;
  pl.spectral_size = static_cast<std::size_t>(p0) * p1 * (p2 / 2 + 1);
  pl.real = fftw_alloc_real(pl.real_size);
  pl.spectral = fftw_alloc_complex(pl.spectral_size);
  pl.forward = fftw_plan_dft_r2c_3d(p0, p1, p2, pl.real, pl.spectral, FFTW_ESTIMATE);
  pl.backward = fftw_plan_dft_c2r_3d(p0, p1, p2, pl.spectral, pl.real, FFTW_ESTIMATE);

  // Kernel over wrapped offsets.
  const double inv4pi = 0.25 * std::numbers::inv_pi;
  auto wrap = [](int d, int p) { return d < p / 2 ? d : d - p; };
  for (int i = 0; i < p0; ++i)
    for (int j = 0; j < p1; ++j)
      for (int k = 0; k < p2; ++k) {
        const Vec3 off(wrap(i, p0) * lat.spacing[0], wrap(j, p1) * lat.spacing[1], wrap(k, p2) * lat.spacing[2]);
        const double r = off.norm();
        pl.real[(static_cast<std::size_t>(i) * p1 + j) * p2 + k] = r == 0.0 ? self_term_ : volume * inv4pi / r;
      }
  fftw_execute(pl.forward);
  pl.kernel_hat.resize(pl.spectral_size);
  for (std::size_t s = 0; s < pl.spectral_size; ++s)
    pl.kernel_hat[s] = {pl.spectral[s][0], pl.spectral[s][1]};

  slot_.reserve(domain.size());
  for (const auto& idx : lat.index)
    slot_.push_back((static_cast<std::size_t>(idx[0]) * p1 + idx[1]) * p2 + idx[2]);
}

LatticeNewtonOperator::~LatticeNewtonOperator() = default;

Eigen::MatrixXd LatticeNewtonOperator::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != n_) throw ConfigError("lattice operator: dimension mismatch");
  Plans& pl = *plans_;
  const double scale = 1.0 / static_cast<double>(pl.real_size);
  Eigen::MatrixXd y(n_, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    std::fill(pl.real, pl.real + pl.real_size, 0.0);
    for (Eigen::Index i = 0; i < n_; ++i) pl.real[slot_[i]] = x(i, c);
    fftw_execute(pl.forward);
    for (std::size_t s = 0; s < pl.spectral_size; ++s) {
      const std::complex<double> v(pl.spectral[s][0], pl.spectral[s][1]);
      const std::complex<double> w = v * pl.kernel_hat[s];
      pl.spectral[s][0] = w.real();
      pl.spectral[s][1] = w.imag();
    }
    fftw_execute(pl.backward);
    for (Eigen::Index i = 0; i < n_; ++i) y(i, c) = pl.real[slot_[i]] * scale;
  }
  return y;
}

}  // namespace subres
