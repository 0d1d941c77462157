#include "lfsm/forecast.hpp"

#include "lfsm/errors.hpp"

#include <cmath>
#include <string>

namespace lfsm {

namespace {

// Threshold below which a predicted increment is reported as no-signal:
// the forecast coincides with the martingale "predict the last observation"
// up to round-off, so its sign carries no information.
constexpr double kSignalEps = 1e-14;

}  // namespace

std::vector<double> extract_innovations(std::span<const double> obs,
                                        const DecompositionCoeffs& coeffs) {
  const auto n = obs.size();
  if (coeffs.d < static_cast<int>(n) + 1)
    throw InputError("extract_innovations: coefficient system is smaller "
                     "than the observation window");
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(obs[i]))
      throw InputError("extract_innovations: observation " +
                       std::to_string(i) + " is not finite");
    double acc = obs[i];
    const int ii = static_cast<int>(i);
    for (int j = 0; j < ii; ++j) acc -= coeffs.at(ii, j) * z[j];
    z[i] = acc / coeffs.at(ii, ii);  // diagonal is positive by construction
  }
  return z;
}

ForecastResult predict_next(std::span<const double> rel_obs,
                            const LfsmParams& p, int d, double anchor) {
  p.validate();
  if (d < 2) throw InputError("predict_next: need d >= 2");
  if (rel_obs.size() != static_cast<std::size_t>(d) - 1)
    throw InputError("predict_next: expected d-1 observations, got " +
                     std::to_string(rel_obs.size()));

  const auto coeffs = CoefficientCache::global().get(p.alpha, p.hurst, 1, d);

  std::vector<double> scaled(rel_obs.size());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    scaled[i] = rel_obs[i] / p.sigma;

  ForecastResult r;
  r.innovations = extract_innovations(scaled, *coeffs);
  double acc = 0.0;
  for (int j = 0; j <= d - 2; ++j)
    acc += coeffs->at(d - 1, j) * r.innovations[static_cast<std::size_t>(j)];

  const double last = anchor + rel_obs.back();
  r.predicted = anchor + p.sigma * acc;
  r.predicted_increment = r.predicted - last;
  r.residual_scale = coeffs->at(d - 1, d - 1) * p.sigma;
  r.method = p.alpha > 1.0 ? "conditional_expectation" : "semimetric_projection";
  r.no_signal = std::fabs(r.predicted_increment) <=
                kSignalEps * std::max(std::fabs(r.predicted), std::fabs(last));
  return r;
}

ForecastResult predict_next(const TimeSeries& series, const LfsmParams& p,
                            int d) {
  if (series.size() < static_cast<std::size_t>(d))
    throw InputError("predict_next: series shorter than the window d");
  const auto n = series.size();
  const double anchor = series.values[n - static_cast<std::size_t>(d)];
  std::vector<double> rel(static_cast<std::size_t>(d) - 1);
  for (std::size_t i = 0; i < rel.size(); ++i)
    rel[i] = series.values[n - d + 1 + i] - anchor;
  return predict_next(rel, p, d, anchor);
}

}  // namespace lfsm
