#pragma once

#include "lfsm/model.hpp"

#include <span>
#include <vector>

namespace lfsm {

struct EstimationConfig {
  // Base increment lag in time units. 0 means "one sample step".
  double tau0 = 0.0;
  // Frequencies for the stability-index regression. Empty means 1..20.
  std::vector<double> theta_grid;
  // Lags for the self-similarity regression, in time units. Empty means
  // {1, 2, 4, 8, 16} * tau0.
  std::vector<double> tau_grid;
};

// One log-log least-squares fit, with the points that survived the
// usability filter and the grid values that were dropped by it.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> x_used;
  std::vector<double> y_used;
  std::vector<double> grid_dropped;
};

struct EstimationResult {
  double alpha_hat = 0.0;
  double h_hat = 0.0;
  double sigma_hat = 0.0;
  RegressionFit alpha_fit;  // slope is the raw S1 = alpha estimate
  RegressionFit h_fit;      // slope is S2 = alpha*hurst estimate
};

// Real part of the empirical characteristic function, mean of cos(theta*y).
double empirical_char_fn(std::span<const double> samples, double theta);

// Stability index from the double-log of the empirical characteristic
// function of base-lag increments against log theta. The increments are
// rescaled to a common working scale first (a provisional scale from the
// mean absolute increment over a coarse alpha grid), which keeps the whole
// theta grid informative; the slope itself does not depend on that constant.
// Returns the estimate clamped to (0, 2]; fewer than two usable grid points
// or a nonpositive slope throw NumericError.
double estimate_alpha(const TimeSeries& series, const EstimationConfig& cfg,
                      RegressionFit* fit = nullptr);

// Self-similarity slope: the same double-log statistic at fixed theta = 1
// against log tau over the lag grid. h = slope / alpha_slope, clamped to
// [0.01, 0.99]. alpha_slope is the raw slope of the alpha regression.
double estimate_h(const TimeSeries& series, const EstimationConfig& cfg,
                  double alpha_slope, RegressionFit* fit = nullptr);

// Scale of the base-lag increment, by inverting the stable first absolute
// moment: sigma = pi / (2 Gamma(1 - 1/alpha)) * mean|X_{t+tau0} - X_t| over
// the raw (un-normalized) series. Requires alpha > 1; the mean diverges
// otherwise (NumericError). tau0 = 0 means one sample step.
double estimate_sigma(const TimeSeries& series, double tau0, double alpha_hat);

// Full pipeline: alpha, then h, then sigma.
EstimationResult estimate(const TimeSeries& series,
                          const EstimationConfig& cfg = {});

}  // namespace lfsm
