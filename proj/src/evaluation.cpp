#include "lfsm/evaluation.hpp"

#include "lfsm/decomposition.hpp"
#include "lfsm/errors.hpp"
#include "lfsm/forecast.hpp"
#include "lfsm/parallel.hpp"
#include "lfsm/stable.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lfsm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Study cells that sit numerically on hurst = 1/alpha would hit the exact
// martingale branch, where every forecast ties the last observation and no
// sign comparison is possible. Solving an epsilon above the boundary keeps
// the cell defined; the path itself is still simulated at the exact hurst.
double study_solve_hurst(double alpha, double hurst) {
  const double boundary = 1.0 / alpha;
  if (std::fabs(hurst - boundary) <= 1e-9) return boundary + 1e-9;
  return hurst;
}

}  // namespace

double lp_residual_norm(const LpQuery& q) {
  if (q.d < 2) throw InputError("lp_residual_norm: need d >= 2");
  if (!(q.p > 0.0) || q.p >= q.alpha)
    throw InputError(
        "lp_residual_norm: need 0 < p < alpha for a finite moment");
  const auto coeffs =
      CoefficientCache::global().get(q.alpha, q.hurst, 1, q.d);
  const double tail = coeffs->at(q.d - 1, q.d - 1);
  return tail * std::pow(abs_moment(q.alpha, q.p), 1.0 / q.p);
}

double fbm_hit_ratio(double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw InputError("fbm_hit_ratio: hurst must lie in (0, 1)");
  const double r = std::pow(2.0, 2.0 * hurst - 1.0) - 1.0;
  return 0.5 + std::fabs(std::asin(r)) / std::numbers::pi;
}

HitStats hit_ratio(std::span<const int> forecast_signs,
                   std::span<const int> realized_signs) {
  if (forecast_signs.size() != realized_signs.size())
    throw InputError("hit_ratio: sign vectors differ in length");
  HitStats s;
  s.total = static_cast<std::int64_t>(forecast_signs.size());
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < forecast_signs.size(); ++i) {
    const int f = forecast_signs[i], r = realized_signs[i];
    if (f == 0) { ++s.n_forecast_zero; continue; }
    if (r == 0) { ++s.n_realized_zero; continue; }
    ++s.n_usable;
    if (f == r) ++hits;
  }
  if (s.n_usable == 0)
    throw NumericError("hit_ratio: no usable forecast/realization pairs");
  s.ratio = static_cast<double>(hits) / static_cast<double>(s.n_usable);
  return s;
}

std::vector<StudyRow> run_simulation_study(const StudyConfig& cfg) {
  if (cfg.alphas.empty() || cfg.hursts.empty() || cfg.window_dims.empty())
    throw InputError("run_simulation_study: empty parameter grid");
  if (cfg.series_length < 8)
    throw InputError("run_simulation_study: series_length too small");
  for (int d : cfg.window_dims)
    if (d < 2 || static_cast<std::size_t>(d) >= cfg.series_length)
      throw InputError("run_simulation_study: window dim d out of range");

  struct Cell { double alpha, hurst; };
  std::vector<Cell> cells;
  for (double a : cfg.alphas)
    for (double h : cfg.hursts) cells.push_back({a, h});

  std::vector<StudyRow> rows(cells.size() * cfg.window_dims.size());

  parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
    const Cell cell = cells[ci];
    const LfsmParams params{cell.alpha, cell.hurst, 1.0};

    // Identical stream in every cell: differences between rows are purely
    // parameter effects.
    Rng rng = Rng::derive(cfg.seed, 0);
    const TimeSeries path =
        simulate_lfsm_sampled(params, 1.0, cfg.series_length, cfg.sim, rng);

    const double h_solve = study_solve_hurst(cell.alpha, cell.hurst);
    for (std::size_t di = 0; di < cfg.window_dims.size(); ++di) {
      const int d = cfg.window_dims[di];
      StudyRow& row = rows[ci * cfg.window_dims.size() + di];
      row.alpha = cell.alpha;
      row.hurst = cell.hurst;
      row.d = d;
      row.hit = kNaN;

      try {
        CoefficientCache::global().get(cell.alpha, h_solve, 1, d);
      } catch (const NumericError&) {
        continue;  // no representation at these parameters
      }
      row.exists = true;

      const LfsmParams fparams{cell.alpha, h_solve, 1.0};
      const std::size_t n_windows = path.size() - static_cast<std::size_t>(d);
      std::vector<int> fsign(n_windows), rsign(n_windows);
      std::vector<double> rel(static_cast<std::size_t>(d) - 1);
      for (std::size_t s = 0; s < n_windows; ++s) {
        const double anchor = path.values[s];
        for (std::size_t i = 0; i < rel.size(); ++i)
          rel[i] = path.values[s + 1 + i] - anchor;
        const ForecastResult fc = predict_next(rel, fparams, d, anchor);
        fsign[s] = fc.no_signal ? 0 : sign_of(fc.predicted_increment);
        rsign[s] = sign_of(path.values[s + d] - path.values[s + d - 1]);
      }

      std::int64_t hits = 0;
      for (std::size_t s = 0; s < n_windows; ++s) {
        if (fsign[s] == 0 || rsign[s] == 0) { ++row.n_ties; continue; }
        ++row.n_forecasts;
        if (fsign[s] == rsign[s]) ++hits;
      }
      if (row.n_forecasts > 0)
        row.hit = static_cast<double>(hits) /
                  static_cast<double>(row.n_forecasts);
    }
  });

  return rows;
}

BacktestReport run_backtest(const TimeSeries& series,
                            const BacktestConfig& cfg) {
  const std::size_t n = series.size();
  if (cfg.d < 2) throw InputError("run_backtest: need d >= 2");
  if (cfg.step < 1) throw InputError("run_backtest: need step >= 1");
  const std::size_t tail_span =
      (static_cast<std::size_t>(cfg.d) - 1) * cfg.step + 1;
  if (cfg.window < 32 || cfg.window < tail_span)
    throw InputError("run_backtest: window too short for estimation and "
                     "the stepped forecast tail");
  if (n < cfg.window + cfg.step)
    throw InputError("run_backtest: series shorter than one window plus "
                     "the forecast step");

  EstimationConfig est = cfg.est;
  if (est.tau0 == 0.0)
    est.tau0 = static_cast<double>(cfg.step) * series.dt;

  // Structural estimation problems (a lag grid that does not fit inside one
  // window, a lag that is not a multiple of the sample spacing) depend only
  // on the window geometry, so they would mark every origin as skipped.
  // Probe the first window once and surface them as a configuration error;
  // data-dependent failures stay per-origin.
  {
    TimeSeries probe;
    probe.t0 = series.t0;
    probe.dt = series.dt;
    probe.values.assign(series.values.begin(),
                        series.values.begin() +
                            static_cast<std::ptrdiff_t>(cfg.window));
    try {
      estimate(probe, est);
    } catch (const InputError& e) {
      throw InputError("run_backtest: estimation cannot run on any window: " +
                       std::string(e.what()));
    } catch (const NumericError&) {
    }
  }

  const std::size_t first_origin = cfg.window - 1;
  const std::size_t last_origin = n - 1 - cfg.step;
  const std::size_t n_windows = last_origin - first_origin + 1;

  BacktestReport rep;
  rep.rows.resize(n_windows);
  rep.n_attempted = static_cast<std::int64_t>(n_windows);

  parallel_for(n_windows, cfg.jobs, [&](std::size_t w) {
    const std::size_t origin = first_origin + w;
    BacktestRow& row = rep.rows[w];
    row.origin = origin;
    row.realized_sign =
        sign_of(series.values[origin + cfg.step] - series.values[origin]);

    TimeSeries hist;
    hist.t0 = series.t0 +
              static_cast<double>(origin + 1 - cfg.window) * series.dt;
    hist.dt = series.dt;
    hist.values.assign(
        series.values.begin() + static_cast<std::ptrdiff_t>(origin + 1 - cfg.window),
        series.values.begin() + static_cast<std::ptrdiff_t>(origin + 1));

    EstimationResult e;
    try {
      e = estimate(hist, est);
    } catch (const std::exception&) {
      row.status = "estimation_failed";
      return;
    }
    row.alpha_hat = e.alpha_hat;
    row.h_hat = e.h_hat;
    row.sigma_hat = e.sigma_hat;

    // Forecast window: d points ending at the origin, spaced step samples.
    const std::size_t anchor_ix =
        origin - (static_cast<std::size_t>(cfg.d) - 1) * cfg.step;
    const double anchor = series.values[anchor_ix];
    std::vector<double> rel(static_cast<std::size_t>(cfg.d) - 1);
    for (std::size_t i = 0; i < rel.size(); ++i)
      rel[i] = series.values[anchor_ix + (i + 1) * cfg.step] - anchor;

    try {
      const LfsmParams p{e.alpha_hat, e.h_hat, e.sigma_hat};
      const ForecastResult fc = predict_next(rel, p, cfg.d, anchor);
      row.predicted_increment = fc.predicted_increment;
      row.forecast_sign = fc.no_signal ? 0 : sign_of(fc.predicted_increment);
      row.status = "ok";
    } catch (const std::exception&) {
      row.status = "decomposition_failed";
    }
  });

  for (const auto& row : rep.rows) {
    if (row.status != "ok") { ++rep.n_skipped; continue; }
    if (row.forecast_sign == 0) { ++rep.n_forecast_zero; continue; }
    if (row.realized_sign == 0) { ++rep.n_realized_zero; continue; }
    ++rep.n_usable;
    if (row.forecast_sign == row.realized_sign) ++rep.hits;
  }
  rep.hit = rep.n_usable > 0
                ? static_cast<double>(rep.hits) / static_cast<double>(rep.n_usable)
                : kNaN;
  return rep;
}

}  // namespace lfsm
