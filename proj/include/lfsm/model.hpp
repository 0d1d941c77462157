#pragma once

#include "lfsm/rng.hpp"

#include <cstdint>
#include <vector>

namespace lfsm {

// Parameter triple of the process: stability index alpha in (0,2], Hurst
// exponent hurst in (0,1), scale sigma > 0. Self-similarity couples the two
// exponents; hurst = 1/alpha is the independent-increment point and is the
// one admissible value above 1 (for alpha < 1 the process is the SaS Levy
// motion, self-similar with index 1/alpha).
struct LfsmParams {
  double alpha = 1.5;
  double hurst = 0.5;
  double sigma = 1.0;

  void validate() const;
};

// Evenly spaced samples. values[k] sits at time t0 + k*dt.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

struct SimConfig {
  double dt = 0.01;         // integration step
  double horizon = 10.0;    // simulate on [0, horizon]
  double truncation = 50.0; // kernel memory kept, in time units before 0

  void validate() const;
};

// Normalization constant K(alpha, hurst) that makes the unit-scale process
// have codifference-scale exactly t^{hurst} at lag t: K^alpha is
//   1/(alpha*hurst) + int_0^1 |(1+u)^xi - u^xi|^alpha du + (inverted tail),
// xi = hurst - 1/alpha. The tail over (1, inf) is mapped exactly onto (0,1)
// by u -> 1/u and both pieces are evaluated by tanh-sinh quadrature after a
// power substitution that removes the endpoint singularity. K(alpha, 1/alpha)
// is exactly 1.
double kernel_constant(const LfsmParams& p);
double kernel_constant_pow(double alpha, double hurst);  // K^alpha

// Fraction of K^alpha carried by the kernel beyond `window` time units into
// the past, i.e. the mass a finite-memory simulation discards. Diagnostic
// only; it is not small for hurst near 1 (about 5e-2 at alpha=2, hurst=0.8,
// window=50, but 3e-5 at hurst=0.2).
double kernel_truncation_tail(double alpha, double hurst, double window);

// Codifference of the process at times t and s (both >= 0):
//   sigma^alpha * K^alpha * (|t|^{alpha*hurst} + |s|^{alpha*hurst}
//                            - |t-s|^{alpha*hurst}).
double lfsm_codifference(double t, double s, const LfsmParams& p);

// Path on [0, horizon] at spacing cfg.dt, X(0) = 0 exactly. Moving-average
// construction on the increment kernel; the infinite past is cut off at
// cfg.truncation time units (see kernel_truncation_tail for what that
// neglects). hurst = 1/alpha is exact: the path is a cumulative sum of iid
// stable steps with no kernel table at all.
TimeSeries simulate_lfsm(const LfsmParams& p, const SimConfig& cfg, Rng& rng);

// n_obs observations at spacing obs_spacing, each obtained by integrating
// across round(obs_spacing/cfg.dt) internal substeps. This is the sampling
// scheme the simulation study uses: a coarse read-out of a finer mesh, so
// that observed increments carry the dependence of the underlying process
// rather than the one-step moving-average artifacts.
TimeSeries simulate_lfsm_sampled(const LfsmParams& p, double obs_spacing,
                                 std::size_t n_obs, const SimConfig& cfg,
                                 Rng& rng);

}  // namespace lfsm
