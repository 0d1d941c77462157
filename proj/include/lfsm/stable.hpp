#pragma once

#include "lfsm/rng.hpp"

#include <span>

namespace lfsm {

// Symmetric alpha-stable scale parameterization: the characteristic function
// of a variate with scale sigma is exp(-(sigma*|theta|)^alpha). At alpha = 2
// this is a centered normal with variance 2*sigma^2 (not sigma^2).
struct StableScale {
  double alpha = 2.0;
  double scale = 1.0;

  void validate() const;  // alpha in (0,2], scale >= 0, both finite
};

// Characteristic function value E[cos(theta X)] for X ~ SaS(s).
double sas_char_fn(double theta, const StableScale& s);

// One draw from the unit-scale symmetric alpha-stable law (Chambers,
// Mallows and Stuck construction). Consumes exactly two uniforms from the
// generator in every branch so that draw streams stay aligned across
// parameter values. |alpha - 1| < 1e-6 snaps to the Cauchy branch.
double sample_sas(double alpha, Rng& rng);

// E[|X|^p] for unit-scale SaS X. Finite for -1 < p < alpha; p >= alpha
// throws InputError (the moment diverges), as do alpha outside (0,2] and
// p <= -1. abs_moment(alpha, 0) == 1.
double abs_moment(double alpha, double p);

}  // namespace lfsm
