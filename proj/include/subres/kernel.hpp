#pragma once

#include <complex>

namespace subres::kernel {

using cplx = std::complex<double>;

// Outgoing Helmholtz Green function e^{i kappa r} / (4 pi r), r > 0.
cplx green(cplx kappa, double r);

// d/dkappa of green(): (i / 4 pi) e^{i kappa r}. Bounded at r = 0.
cplx green_derivative(cplx kappa, double r);

// Integral of green() over a ball of radius a about its own center,
//   int_0^a r e^{i kappa r} dr,
// which equals a^2/2 at kappa = 0 (the Newton potential of the equal-volume
// ball at its center).
cplx ball_self_term(cplx kappa, double a);

// d/dkappa of ball_self_term(): i int_0^a r^2 e^{i kappa r} dr. Equals
// (i / 4 pi) * (4 pi a^3 / 3) at kappa = 0.
cplx ball_self_term_derivative(cplx kappa, double a);

}  // namespace subres::kernel
