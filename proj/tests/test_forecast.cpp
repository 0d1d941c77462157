#include "lfsm/forecast.hpp"

#include "lfsm/decomposition.hpp"
#include "lfsm/errors.hpp"
#include "lfsm/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

using namespace lfsm;

TEST_CASE("innovation extraction inverts the triangle") {
  const auto C = solve_coefficients(1.7, 0.7, 1, 6);
  Rng rng(7);
  std::vector<double> z(5);
  for (auto& v : z) v = 2.0 * rng.uniform01() - 1.0;

  std::vector<double> obs(5, 0.0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) obs[static_cast<std::size_t>(i)] += C.at(i, j) * z[static_cast<std::size_t>(j)];

  const auto back = extract_innovations(obs, C);
  REQUIRE(back.size() == z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(back[i] == doctest::Approx(z[i]).epsilon(1e-12));
}

TEST_CASE("gaussian forecast matches the covariance conditional expectation") {
  Rng rng(1234);
  for (double hurst : {0.3, 0.7}) {
    for (int d : {2, 5}) {
      for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> rel(static_cast<std::size_t>(d) - 1);
        for (auto& v : rel) v = 4.0 * rng.uniform01() - 2.0;
        const double oracle = oracles::gaussian_predict(rel, hurst, d);
        const auto r = predict_next(rel, {2.0, hurst, 1.0}, d);
        CHECK(r.predicted ==
              doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
        CHECK(std::strcmp(r.method, "conditional_expectation") == 0);
      }
    }
  }
}

TEST_CASE("scale equivariance of the forecast") {
  // Multiplying observations and sigma by the same factor multiplies the
  // prediction by that factor; innovations are unchanged.
  std::vector<double> rel{0.4, -0.2, 0.9};
  const auto base = predict_next(rel, {1.6, 0.72, 1.0}, 4);
  std::vector<double> scaled;
  for (double v : rel) scaled.push_back(17.0 * v);
  const auto big = predict_next(scaled, {1.6, 0.72, 17.0}, 4);
  CHECK(big.predicted == doctest::Approx(17.0 * base.predicted).epsilon(1e-13));
  CHECK(big.residual_scale ==
        doctest::Approx(17.0 * base.residual_scale).epsilon(1e-13));
  for (std::size_t i = 0; i < base.innovations.size(); ++i)
    CHECK(big.innovations[i] ==
          doctest::Approx(base.innovations[i]).epsilon(1e-12));
}

TEST_CASE("independent increments predict no move") {
  // At hurst = 1/alpha the best forecast is the last observation itself;
  // the result must say so via the no-signal flag. alpha = 0.8 exercises
  // the Levy case where 1/alpha > 1 is still a valid hurst.
  for (double alpha : {0.8, 1.25, 2.0}) {
    std::vector<double> rel{0.3, -0.8, 1.1, 0.25};
    const auto r = predict_next(rel, {alpha, 1.0 / alpha, 2.5}, 5, 10.0);
    CHECK(r.predicted == doctest::Approx(10.0 + rel.back()).epsilon(1e-13));
    CHECK(std::fabs(r.predicted_increment) < 1e-12);
    CHECK(r.no_signal);
  }
}

TEST_CASE("two-point forecast sign follows the regime") {
  // d = 2: one observed increment. Persistent parameters continue the move,
  // antipersistent parameters fade it, and the magnitudes agree with the
  // solved coefficient ratio.
  const double up = 0.7;
  SUBCASE("persistent momentum") {
    const auto r = predict_next(std::vector<double>{up}, {1.5, 0.8, 1.0}, 2);
    CHECK(r.predicted_increment > 0.0);
    CHECK_FALSE(r.no_signal);
    const auto C = solve_coefficients(1.5, 0.8, 1, 2);
    CHECK(r.predicted ==
          doctest::Approx(up * C.at(1, 0) / C.at(0, 0)).epsilon(1e-12));
  }
  SUBCASE("antipersistent reversal") {
    const auto r = predict_next(std::vector<double>{up}, {1.5, 0.5, 1.0}, 2);
    CHECK(r.predicted_increment < 0.0);
    CHECK(r.predicted > 0.0);  // fades toward the anchor, does not overshoot
  }
  SUBCASE("downward move mirrors") {
    const auto r = predict_next(std::vector<double>{-up}, {1.5, 0.8, 1.0}, 2);
    CHECK(r.predicted_increment < 0.0);
  }
}

TEST_CASE("projection label below the moment barrier") {
  const auto r = predict_next(std::vector<double>{0.5}, {0.9, 0.6, 1.0}, 2);
  CHECK(std::strcmp(r.method, "semimetric_projection") == 0);
  const auto C = solve_coefficients(0.9, 0.6, 1, 2);
  CHECK(r.residual_scale == doctest::Approx(C.at(1, 1)).epsilon(1e-12));
}

TEST_CASE("series overload frames the last window") {
  TimeSeries s;
  s.t0 = 3.0;
  s.dt = 0.5;
  s.values = {9.9, 5.0, 5.4, 5.1, 5.6};
  const LfsmParams p{1.8, 0.65, 0.7};
  const auto via_series = predict_next(s, p, 4);
  const std::vector<double> rel{0.4, 0.1, 0.6};
  const auto via_span = predict_next(rel, p, 4, 5.0);
  CHECK(via_series.predicted == doctest::Approx(via_span.predicted).epsilon(1e-14));
  CHECK(via_series.predicted_increment ==
        doctest::Approx(via_span.predicted_increment).epsilon(1e-12));

  // Level translation moves the prediction by the same constant.
  TimeSeries shifted = s;
  for (auto& v : shifted.values) v += 100.0;
  const auto moved = predict_next(shifted, p, 4);
  CHECK(moved.predicted_increment ==
        doctest::Approx(via_series.predicted_increment).epsilon(1e-9));
}

TEST_CASE("forecast input validation") {
  const LfsmParams p{1.5, 0.7, 1.0};
  CHECK_THROWS_AS(predict_next(std::vector<double>{0.1, 0.2}, p, 2), InputError);
  CHECK_THROWS_AS(predict_next(std::vector<double>{0.1}, p, 1), InputError);
  const double bad = std::nan("");
  CHECK_THROWS_AS(predict_next(std::vector<double>{bad}, p, 2), InputError);
  CHECK_THROWS_AS(predict_next(std::vector<double>{0.1},
                               LfsmParams{1.5, 0.7, -1.0}, 2),
                  InputError);
  TimeSeries tiny;
  tiny.values = {1.0, 2.0};
  CHECK_THROWS_AS(predict_next(tiny, p, 3), InputError);

  // Innovation extraction rejects a window larger than the triangle.
  const auto C = solve_coefficients(1.5, 0.7, 1, 2);
  CHECK_THROWS_AS(extract_innovations(std::vector<double>{0.1, 0.2, 0.3}, C),
                  InputError);
}
