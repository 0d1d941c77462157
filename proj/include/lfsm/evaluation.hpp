#pragma once

#include "lfsm/estimation.hpp"
#include "lfsm/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lfsm {

// Dispersion of the one-step forecast error in the L_p sense: the residual
// innovation enters with weight |a_{d-1,d-1}|, so the error's p-th absolute
// moment is (|a_{d-1,d-1}| at unit scale)^p * E|Z|^p. Requires 0 < p < alpha
// (the moment diverges at p >= alpha).
struct LpQuery {
  double alpha = 1.5;
  double hurst = 0.5;
  int d = 2;
  double p = 1.0;
};
double lp_residual_norm(const LpQuery& q);

// Probability that consecutive increments of the Gaussian (alpha = 2) limit
// share their sign, as a function of hurst: 1/2 + |asin(r)| / pi with
// r = 2^{2 hurst - 1} - 1 the lag-one increment correlation. Exactly 1/2 at
// hurst = 1/2, about 0.672 at hurst = 0.8.
double fbm_hit_ratio(double hurst);

// Sign-agreement bookkeeping. signs are -1, 0, +1; zero on the forecast
// side means no usable signal, zero on the realized side an exact tie.
// Pairs with a zero on either side are excluded from the ratio and counted
// separately. No usable pair at all is an error (NumericError).
struct HitStats {
  double ratio = 0.0;
  std::int64_t n_usable = 0;
  std::int64_t n_forecast_zero = 0;
  std::int64_t n_realized_zero = 0;
  std::int64_t total = 0;
};
HitStats hit_ratio(std::span<const int> forecast_signs,
                   std::span<const int> realized_signs);

// Monte Carlo sweep over parameter cells: simulate one long path per cell,
// roll a (d+1)-point window through it, forecast the last point of each
// window from the rest, and score sign agreement. Every cell consumes the
// identical noise stream (same master seed) so that differences between
// cells are parameter effects, not sampling noise.
struct StudyConfig {
  std::vector<double> alphas{1.5};
  std::vector<double> hursts{0.5};
  std::vector<int> window_dims{2};  // d values
  std::size_t series_length = 2001;
  SimConfig sim;                    // sim.dt sets the sub-observation mesh
  std::uint64_t seed = 42;
  int jobs = 1;
};

struct StudyRow {
  double alpha = 0.0;
  double hurst = 0.0;
  int d = 0;
  double hit = 0.0;            // NaN when not defined
  std::int64_t n_forecasts = 0;
  bool exists = false;         // decomposition solvable at these parameters
  std::int64_t n_ties = 0;
};

std::vector<StudyRow> run_simulation_study(const StudyConfig& cfg);

// Rolling out-of-sample evaluation on a given series: estimate all three
// parameters on each length-`window` history, forecast one step of size
// `step` samples ahead, compare signs against the realized increment.
// Windows advance one sample at a time. Failed estimations or unsolvable
// decompositions skip the window but keep its row.
struct BacktestConfig {
  std::size_t window = 720;
  int d = 3;
  std::size_t step = 1;
  int jobs = 1;
  EstimationConfig est;  // tau0 = 0 resolves to one step lag
};

struct BacktestRow {
  std::size_t origin = 0;       // index of the forecast origin observation
  double alpha_hat = 0.0;
  double h_hat = 0.0;
  double sigma_hat = 0.0;
  double predicted_increment = 0.0;
  int forecast_sign = 0;
  int realized_sign = 0;
  std::string status;           // ok | estimation_failed | decomposition_failed
};

struct BacktestReport {
  std::vector<BacktestRow> rows;
  std::int64_t n_attempted = 0;
  std::int64_t n_skipped = 0;
  std::int64_t n_forecast_zero = 0;
  std::int64_t n_realized_zero = 0;
  std::int64_t n_usable = 0;
  std::int64_t hits = 0;
  double hit = 0.0;  // NaN when nothing was usable
};

BacktestReport run_backtest(const TimeSeries& series,
                            const BacktestConfig& cfg);

}  // namespace lfsm
