#include "lfsm/model.hpp"

#include "lfsm/errors.hpp"
#include "lfsm/quadrature.hpp"
#include "lfsm/stable.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lfsm {

namespace {

// Snap width for the independent-increment point hurst == 1/alpha. Inside
// this window xi is treated as exactly zero (K = 1, indicator kernel).
constexpr double kXiSnap = 1e-12;

// |(1+w)^xi - 1| / w, the bounded factor of the inverted-tail integrand.
// Uses expm1/log1p so small w does not cancel; below 1e-8 a first-order
// series avoids the 0/0.
double tail_factor(double w, double xi) {
  if (w < 1e-8) return std::fabs(xi) * (1.0 + 0.5 * w * (xi - 1.0));
  return std::fabs(std::expm1(xi * std::log1p(w))) / w;
}

// Integral over (0, upper) of w^{s1} * tail_factor(w, xi)^alpha, where
// s1 = alpha*(1-hurst) - 1 may approach -1. The singular power is removed
// by w = upper * v^q with q chosen so the transformed integrand vanishes at
// v = 0; powers of v are taken directly so nothing underflows on the way.
double inverted_tail_piece(double alpha, double xi, double upper) {
  const double s1 = alpha * (1.0 - (xi + 1.0 / alpha)) - 1.0;  // alpha(1-H)-1
  const double scale = std::pow(upper, s1 + 1.0);
  if (s1 >= 0.0) {
    return scale * integrate_01(
        [=](double v) {
          const double w = upper * v;
          return std::pow(v, s1) * std::pow(tail_factor(w, xi), alpha);
        },
        "kernel tail piece");
  }
  const double q = std::ceil(2.0 / (s1 + 1.0));
  return scale * integrate_01(
      [=](double v) {
        const double w = upper * std::pow(v, q);
        return q * std::pow(v, q * (s1 + 1.0) - 1.0) *
               std::pow(tail_factor(w, xi), alpha);
      },
      "kernel tail piece");
}

// 1 - (u/(1+u))^e for e > 0, evaluated as -expm1(e*log(u/(1+u))). The
// argument of expm1 is always <= 0, so nothing overflows, and the result
// keeps full relative precision when e is so small that the direct power
// would cancel to round-off against 1.
double one_minus_ratio_pow(double u, double e) {
  if (u == 0.0) return 1.0;
  return -std::expm1(e * std::log(u / (1.0 + u)));
}

// Integral over (0, 1) of |(1+u)^xi - u^xi|^alpha. For xi > 0 the integrand
// is bounded (it tends to 1 at the origin) and is integrated directly in the
// factored form (1+u)^xi * (1 - (u/(1+u))^xi), which stays accurate as xi
// approaches 0. For xi < 0 the u^xi factor blows up at the origin; factoring
// it out leaves the exponent alpha*H - 1, removed by a power substitution.
double inner_piece(double alpha, double xi) {
  if (xi > 0.0) {
    return integrate_01(
        [=](double u) {
          const double g = std::pow(1.0 + u, xi) * one_minus_ratio_pow(u, xi);
          return std::pow(g, alpha);
        },
        "kernel inner piece");
  }
  const double ah = alpha * (xi + 1.0 / alpha);  // alpha*H in (0, 1) here
  const double q = std::ceil(2.0 / ah);
  return integrate_01(
      [=](double v) {
        const double u = std::pow(v, q);
        return q * std::pow(v, q * ah - 1.0) *
               std::pow(one_minus_ratio_pow(u, -xi), alpha);
      },
      "kernel inner piece");
}

}  // namespace

void LfsmParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 2.0) || !std::isfinite(alpha))
    throw InputError("LfsmParams: alpha must lie in (0, 2]");
  // hurst = 1/alpha is admitted even above 1: the kernel collapses to an
  // indicator and the process is the SaS Levy motion, whose self-similarity
  // index 1/alpha exceeds 1 once alpha < 1.
  const bool levy_line =
      std::isfinite(hurst) && std::fabs(hurst - 1.0 / alpha) < kXiSnap;
  if (!(hurst > 0.0) || !std::isfinite(hurst) ||
      (!(hurst < 1.0) && !levy_line))
    throw InputError("LfsmParams: hurst must lie in (0, 1) or equal 1/alpha");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InputError("LfsmParams: sigma must be finite and positive");
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw InputError("SimConfig: dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon))
    throw InputError("SimConfig: horizon must be at least one step");
  if (!(truncation >= 0.0) || !std::isfinite(truncation))
    throw InputError("SimConfig: truncation must be nonnegative");
}

double kernel_constant_pow(double alpha, double hurst) {
  LfsmParams{alpha, hurst, 1.0}.validate();
  const double xi = hurst - 1.0 / alpha;
  if (std::fabs(xi) < kXiSnap) return 1.0;
  return 1.0 / (alpha * hurst) + inner_piece(alpha, xi) +
         inverted_tail_piece(alpha, xi, 1.0);
}

double kernel_constant(const LfsmParams& p) {
  return std::pow(kernel_constant_pow(p.alpha, p.hurst), 1.0 / p.alpha);
}

double kernel_truncation_tail(double alpha, double hurst, double window) {
  if (!(window > 0.0) || !std::isfinite(window))
    throw InputError("kernel_truncation_tail: window must be positive");
  const double xi = hurst - 1.0 / alpha;
  const double total = kernel_constant_pow(alpha, hurst);
  if (std::fabs(xi) < kXiSnap)
    return 0.0;  // indicator kernel has no memory past the window at all
  return inverted_tail_piece(alpha, xi, 1.0 / window) / total;
}

double lfsm_codifference(double t, double s, const LfsmParams& p) {
  p.validate();
  if (!std::isfinite(t) || !std::isfinite(s) || t < 0.0 || s < 0.0)
    throw InputError("lfsm_codifference: times must be finite and >= 0");
  const double ah = p.alpha * p.hurst;
  const double kpow = kernel_constant_pow(p.alpha, p.hurst);
  const double sa = std::pow(p.sigma, p.alpha);
  return sa * kpow *
         (std::pow(t, ah) + std::pow(s, ah) - std::pow(std::fabs(t - s), ah));
}

namespace {

// Core moving-average engine. Produces n_out points at stride m on a grid of
// step dt, with the kernel memory cut off at trunc_steps steps before time 0.
// Observation increments are D_k = sum_i h_i dL, h_i = phi(i) - phi(i-m),
// phi(n) = (n*dt)^xi for n >= 1 and 0 otherwise; the path is the running sum
// of the D_k, which makes X(0) = 0 exact and cancels the common infinite-past
// term analytically instead of numerically.
std::vector<double> ma_path(const LfsmParams& p, double dt, std::size_t m,
                            std::size_t n_out, std::size_t trunc_steps,
                            Rng& rng) {
  const double xi = p.hurst - 1.0 / p.alpha;
  const double step_scale = p.sigma * std::pow(dt, 1.0 / p.alpha);
  const std::size_t n_steps = (n_out - 1) * m;

  std::vector<double> out(n_out, 0.0);

  if (std::fabs(xi) < kXiSnap) {
    // Indicator kernel: exact cumulative sum of iid stable steps.
    double x = 0.0;
    for (std::size_t k = 1; k < n_out; ++k) {
      double block = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        block += sample_sas(p.alpha, rng) * step_scale;
      x += block;
      out[k] = x;
    }
    return out;
  }

  // Kernel weight table phi(n), n = 1 .. n_steps + trunc_steps.
  const std::size_t n_w = n_steps + trunc_steps;
  std::vector<double> phi(n_w + 1, 0.0);
  for (std::size_t n = 1; n <= n_w; ++n)
    phi[n] = std::pow(static_cast<double>(n) * dt, xi);

  // Driving noise, oldest first: dl[0] is trunc_steps before time 0.
  std::vector<double> dl(n_w);
  for (auto& v : dl) v = sample_sas(p.alpha, rng) * step_scale;

  double x = 0.0;
  for (std::size_t k = 1; k < n_out; ++k) {
    // D_k = sum over noise up to time k*m of [phi(lag) - phi(lag - m)].
    const std::size_t hi = k * m + trunc_steps;  // dl index + 1 of newest term
    double d = 0.0;
    for (std::size_t i = 1; i <= hi; ++i)
      d += (phi[i] - (i > m ? phi[i - m] : 0.0)) * dl[hi - i];
    x += d;
    out[k] = x;
  }
  return out;
}

}  // namespace

TimeSeries simulate_lfsm(const LfsmParams& p, const SimConfig& cfg, Rng& rng) {
  p.validate();
  cfg.validate();
  const auto n_out = static_cast<std::size_t>(std::lround(cfg.horizon / cfg.dt)) + 1;
  const auto trunc = static_cast<std::size_t>(std::lround(cfg.truncation / cfg.dt));
  TimeSeries ts;
  ts.t0 = 0.0;
  ts.dt = cfg.dt;
  ts.values = ma_path(p, cfg.dt, 1, n_out, trunc, rng);
  return ts;
}

TimeSeries simulate_lfsm_sampled(const LfsmParams& p, double obs_spacing,
                                 std::size_t n_obs, const SimConfig& cfg,
                                 Rng& rng) {
  p.validate();
  cfg.validate();
  if (!(obs_spacing > 0.0) || !std::isfinite(obs_spacing))
    throw InputError("simulate_lfsm_sampled: obs_spacing must be positive");
  if (n_obs < 2) throw InputError("simulate_lfsm_sampled: need n_obs >= 2");
  const auto m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(obs_spacing / cfg.dt)));
  const double dt = obs_spacing / static_cast<double>(m);
  const auto trunc = static_cast<std::size_t>(std::lround(cfg.truncation / dt));
  TimeSeries ts;
  ts.t0 = 0.0;
  ts.dt = obs_spacing;
  ts.values = ma_path(p, dt, m, n_obs, trunc, rng);
  return ts;
}

}  // namespace lfsm
