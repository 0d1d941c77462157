#pragma once

#include "lfsm/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace lfsm {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |last level - previous level|
  int levels = 0;
  bool converged = false;
};

// Tanh-sinh quadrature on the open interval (0, 1).
//
// The integrand is evaluated at nodes clustered double-exponentially toward
// both endpoints; node positions near 0 are passed at full precision (down to
// about 1e-290), so integrable endpoint behaviour is handled as long as the
// integrand itself vanishes or stays bounded there. Strong power-law
// singularities (exponent near -1) must be removed by substitution before
// calling this: below the smallest representable node the neglected mass of
// u^c is u^{c+1}/(c+1), which for c close to -1 is not small in double
// precision no matter how the nodes are placed.
template <class F>
QuadratureResult tanh_sinh_01(F&& f, double rel_tol = 1e-11,
                              int max_level = 12) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  constexpr double kMinNode = 1e-290;  // stop refining t once delta drops below

  // One abscissa pair at parameter t: nodes delta and 1 - delta with the
  // derivative weight pi*cosh(t)*delta*(1-delta), using the exact identity
  // sech^2(y) = 4*delta*(1-delta) for delta = 1/(1+e^{2y}), y = (pi/2)sinh(t).
  auto pair_term = [&](double t) -> double {
    const double y = kHalfPi * std::sinh(t);
    const double delta = 1.0 / (1.0 + std::exp(2.0 * y));
    if (delta < kMinNode) return 0.0;
    const double w = std::numbers::pi * std::cosh(t) * delta * (1.0 - delta);
    return w * (f(delta) + f(1.0 - delta));
  };

  // Level 0: h = 1, t = 0, 1, 2, ... until terms vanish.
  double sum = 0.5 * pair_term(0.0);
  for (int k = 1; k <= 7; ++k) {
    const double term = pair_term(static_cast<double>(k));
    sum += term;
    if (term == 0.0) break;
  }

  QuadratureResult out;
  double h = 1.0;
  double prev = sum * h;  // crude level-0 estimate
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    // Add the odd multiples of the new h.
    double extra = 0.0;
    for (int k = 1;; k += 2) {
      const double t = h * static_cast<double>(k);
      const double term = pair_term(t);
      extra += term;
      if (t > 3.0 && term <= 1e-16 * std::fabs(extra)) break;
      if (t > 7.5) break;
    }
    sum = sum + extra;
    const double estimate = sum * h;
    out.value = estimate;
    out.error_estimate = std::fabs(estimate - prev);
    out.levels = level;
    if (level >= 3 &&
        out.error_estimate <= rel_tol * std::fabs(estimate) + 1e-300) {
      out.converged = true;
      return out;
    }
    prev = estimate;
  }
  return out;
}

// Convenience wrapper that insists on convergence.
template <class F>
double integrate_01(F&& f, const char* what, double rel_tol = 1e-11) {
  QuadratureResult r = tanh_sinh_01(std::forward<F>(f), rel_tol);
  if (!r.converged)
    throw NumericError(std::string("quadrature failed to converge for ") +
                       what + " (error estimate " +
                       std::to_string(r.error_estimate) + ")");
  return r.value;
}

}  // namespace lfsm
