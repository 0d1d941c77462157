#pragma once

#include "lfsm/decomposition.hpp"
#include "lfsm/model.hpp"

#include <span>
#include <vector>

namespace lfsm {

struct ForecastResult {
  double predicted = 0.0;           // level forecast, original series units
  double predicted_increment = 0.0; // predicted minus the last observation
  double residual_scale = 0.0;      // |a_{d-1,d-1}| * sigma
  std::vector<double> innovations;  // extracted Z_0 .. Z_{d-2}
  bool no_signal = false;           // increment below noise floor (see below)
  const char* method = "";          // how the truncated row is justified
};

// Innovations behind d-1 observations: obs[i] is the process at lag i+1
// from the window anchor, already normalized to unit scale, and
//   Z_i = (obs[i] - sum_{j<i} a_{i,j} Z_j) / a_{i,i}.
// Requires coeffs.d >= obs.size() + 1 and finite observations.
std::vector<double> extract_innovations(std::span<const double> obs,
                                        const DecompositionCoeffs& coeffs);

// One-step forecast from the last d points of the window: the anchor and
// d-1 subsequent observations. rel_obs holds those d-1 observations minus
// the anchor, in original units; p supplies alpha, hurst and the scale the
// observations are divided by. The prediction is the truncated d-1 row of
// the triangular representation applied to the extracted innovations: the
// conditional expectation when alpha > 1 ("conditional_expectation"), the
// codifference-orthogonal projection when alpha <= 1
// ("semimetric_projection"). The returned level is anchor + predicted
// relative part.
ForecastResult predict_next(std::span<const double> rel_obs,
                            const LfsmParams& p, int d, double anchor = 0.0);

// Same, framed on a series: uses the last d values, the anchor being the
// earliest of them. Returns levels in series units.
ForecastResult predict_next(const TimeSeries& series, const LfsmParams& p,
                            int d);

}  // namespace lfsm
