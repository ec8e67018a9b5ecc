#pragma once

#include <complex>

// Scalar special functions used by the Mellin-Barnes evaluator and the
// channel statistics: complex log-gamma, real digamma, and the upper
// incomplete gamma function. All routines are deterministic and thread-safe.

namespace uwoc::specfn {

namespace detail {

// Lanczos log-gamma without pole/NaN checks, for use on integration
// contours where the caller guarantees the argument is off the poles.
// For Re z >= 0.5 this is the principal branch; for Re z < 0.5 it is
// computed by reflection and the imaginary part may differ from the
// principal branch by a multiple of 2*pi (exp() of it is always Gamma(z)).
std::complex<double> lgamma_core(std::complex<double> z) noexcept;

}  // namespace detail

// log Gamma(z) for complex z. Principal branch for Re z >= 0.5; reflected
// elsewhere (see detail::lgamma_core). Throws std::domain_error if z is
// non-finite or within 1e-12 of a pole (z = 0, -1, -2, ...).
std::complex<double> log_gamma(std::complex<double> z);

// psi(x) = d/dx log Gamma(x) for x > 0. Throws std::domain_error otherwise.
double digamma(double x);

// Unnormalized upper incomplete gamma Gamma(p, x) = int_x^inf t^{p-1} e^{-t} dt
// for p > 0, x >= 0. Gamma(p, 0) = Gamma(p). Throws std::domain_error on bad
// arguments.
double upper_incomplete_gamma(double p, double x);

}  // namespace uwoc::specfn
