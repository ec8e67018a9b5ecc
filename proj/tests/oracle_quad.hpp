#pragma once

// Test-only quadrature oracles built on Boost.Math. The shipped library never
// depends on these; they provide independent reference values for the
// closed-form implementations under test.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// Integral over (0, inf). The integrand is evaluated as given; guard it
// yourself if it can throw.
template <typename F>
double integrate_positive_axis(F&& f, double tol = 1e-9) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), tol);
}

// Integral over [a, b] with endpoint-singularity tolerance.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-9) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), a, b, tol);
}

// Integral over (a, inf).
template <typename F>
double integrate_from(F&& f, double a, double tol = 1e-9) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), a,
                              std::numeric_limits<double>::infinity(), tol);
}

// Integral over (0, inf) of a density-like integrand that may have an
// integrable singularity at the origin: singular head via tanh-sinh on
// [0, 1], smooth tail via exp-sinh on (1, inf).
template <typename F>
double integrate_density(F&& f, double tol = 1e-9) {
  return integrate(f, 0.0, 1.0, tol) + integrate_from(f, 1.0, tol);
}

// Fixed 15-node Gauss-Legendre panel; exact enough for smooth narrow panels
// and cheap enough to build cumulative integrals from thousands of them.
template <typename F>
double gauss_panel(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 15>::integrate(std::forward<F>(f), a, b);
}

// Wraps a density so offending tail arguments (evaluator overflow guards)
// count as zero mass; used only where the true value is below underflow.
template <typename F>
auto zero_on_overflow(F f) {
  return [f](double x) -> double {
    try {
      return f(x);
    } catch (const std::overflow_error&) {
      return 0.0;
    }
  };
}

}  // namespace oracle
