#include "lfsm/decomposition.hpp"

#include "lfsm/errors.hpp"
#include "lfsm/model.hpp"
#include "lfsm/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <thread>
#include <vector>

using namespace lfsm;

namespace {

// Plug a solved triangle back into every codifference equation it claims to
// satisfy and return the largest absolute mismatch, scaled nothing: the
// acceptance threshold is absolute, matching the solver's tolerance.
double plugback_residual(const DecompositionCoeffs& C) {
  const double ah = C.alpha * C.hurst;
  double worst = 0.0;
  for (int ip = 0; ip < C.d; ++ip) {
    for (int i = 0; i <= ip; ++i) {
      double lhs = 0.0;
      for (int j = 0; j <= i; ++j)
        lhs += std::pow(std::fabs(C.at(ip, j)), C.alpha) -
               std::pow(std::fabs(C.at(ip, j) - C.at(i, j)), C.alpha);
      const double rhs =
          C.kernel_pow *
          (std::pow(static_cast<double>(C.t + ip), ah) -
           std::pow(static_cast<double>(ip - i), ah));
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("single innovation at d = 1") {
  const auto C = solve_coefficients(1.5, 0.8, 4, 1);
  CHECK(C.at(0, 0) ==
        doctest::Approx(kernel_constant({1.5, 0.8, 1.0}) * std::pow(4.0, 0.8))
            .epsilon(1e-12));
}

TEST_CASE("gaussian case equals the covariance cholesky factor") {
  // At alpha = 2 the triangular system is the Cholesky factorization of the
  // increment covariance (half the codifference). The cascade must agree
  // with a direct dense factorization.
  const double hurst = 0.7;
  const int d = 6;
  const std::int64_t t = 1;
  const auto C = solve_coefficients(2.0, hurst, t, d);

  const double k2 = oracles::kernel_pow_gaussian(hurst);
  std::vector<double> cov(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double u = static_cast<double>(t + i);
      const double v = static_cast<double>(t + j);
      cov[static_cast<std::size_t>(i) * d + j] =
          0.5 * k2 *
          (std::pow(u, 2.0 * hurst) + std::pow(v, 2.0 * hurst) -
           std::pow(std::fabs(u - v), 2.0 * hurst));
    }
  const auto L = oracles::cholesky(cov, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j)
      CHECK(C.at(i, j) ==
            doctest::Approx(L[static_cast<std::size_t>(i) * d + j]).epsilon(1e-10));
}

TEST_CASE("independence line is closed form and exact") {
  // alpha = 0.8 puts hurst = 1/alpha above 1: the Levy-motion case is the
  // one parameter point admitted there.
  for (double alpha : {0.8, 1.25, 2.0}) {
    const double h = 1.0 / alpha;
    for (std::int64_t t : {1, 3}) {
      const auto C = solve_coefficients(alpha, h, t, 5);
      const double root = std::pow(static_cast<double>(t), 1.0 / alpha);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j <= i; ++j)
          CHECK(C.at(i, j) == (j == 0 ? root : 1.0));
      CHECK(C.kernel_pow == 1.0);
    }
  }
}

TEST_CASE("frozen anchor values") {
  // Values pinned from an independent bracketing root-finder.
  const auto up = solve_coefficients(1.5, 0.8, 1, 3);
  CHECK(up.at(0, 0) == doctest::Approx(1.03548879).epsilon(1e-6));
  CHECK(up.at(1, 0) == doctest::Approx(1.32245354).epsilon(1e-6));
  CHECK(up.at(1, 1) == doctest::Approx(0.93215478).epsilon(1e-6));
  CHECK(up.at(2, 0) == doctest::Approx(1.49581727).epsilon(1e-6));
  CHECK(up.at(2, 1) == doctest::Approx(1.14491830).epsilon(1e-6));
  CHECK(up.at(2, 2) == doctest::Approx(0.92065767).epsilon(1e-6));

  const auto dn = solve_coefficients(1.5, 0.45, 1, 3);
  CHECK(dn.at(0, 0) == doctest::Approx(1.49947425).epsilon(1e-6));
  CHECK(dn.at(1, 0) == doctest::Approx(1.17766237).epsilon(1e-6));
  CHECK(dn.at(1, 1) == doctest::Approx(1.39836006).epsilon(1e-6));
  CHECK(dn.at(2, 0) == doctest::Approx(1.10860442).epsilon(1e-6));
  CHECK(dn.at(2, 1) == doctest::Approx(1.04954547).epsilon(1e-6));
  CHECK(dn.at(2, 2) == doctest::Approx(1.37480767).epsilon(1e-6));
}

TEST_CASE("plugback residuals and orderings across the parameter box") {
  Rng rng(41);
  for (int k = 0; k < 8; ++k) {
    const double alpha = 1.0 + rng.uniform01();
    const double hurst = 0.15 + 0.75 * rng.uniform01();
    SolveReport report;
    const auto C = solve_coefficients(alpha, hurst, 1, 6, 1e-10, &report);
    CHECK(plugback_residual(C) < 1e-9);

    // Column ordering: increasing down each column when hurst > 1/alpha,
    // decreasing when below, diagonal included.
    const bool up = hurst > 1.0 / alpha;
    for (int j = 0; j < 6; ++j)
      for (int i = j + 1; i < 6; ++i) {
        const double lower = C.at(i, j);
        const double upper = C.at(i - 1, j);
        if (up) CHECK(lower >= upper);
        else CHECK(lower <= upper);
      }
    // Diagonal positive, iteration budget respected.
    for (int i = 0; i < 6; ++i) CHECK(C.at(i, i) > 0.0);
    for (const auto& eq : report.equations) CHECK(eq.iterations <= 100);
    CHECK(report.max_residual <= 1e-10);
  }
}

TEST_CASE("first off-diagonal stays inside its branch bounds") {
  // For d = 2 at start time 2 the solved entry lies above the diagonal but
  // below the full scale of time 3 on the persistent branch, and strictly
  // between zero and the diagonal on the antipersistent branch.
  for (double alpha : {1.2, 1.7, 2.0}) {
    for (double hurst : {0.3, 0.55, 0.85}) {
      const auto C = solve_coefficients(alpha, hurst, 2, 2);
      const double k = std::pow(C.kernel_pow, 1.0 / alpha);
      if (hurst > 1.0 / alpha) {
        CHECK(C.at(1, 0) >= C.at(0, 0) - 1e-12);
        CHECK(C.at(1, 0) <= k * std::pow(3.0, hurst) + 1e-12);
      } else {
        CHECK(C.at(1, 0) > 0.0);
        CHECK(C.at(1, 0) <= C.at(0, 0) + 1e-12);
      }
    }
  }
}

TEST_CASE("newton solver agrees with the gaussian closed form") {
  // Force the iterative path with alpha just below 2 and compare against
  // the linear alpha = 2 solution; the roots must converge to each other.
  const double a_ii = 1.2, target = 3.7;
  const auto exact = newton_solve_offdiag(target, a_ii, 2.0, true, 1e-12, 2.0);
  const auto near2 =
      newton_solve_offdiag(target, a_ii, 2.0 - 1e-9, true, 1e-12, 2.0);
  REQUIRE(exact.ok);
  REQUIRE(near2.ok);
  CHECK(exact.iterations == 0);
  CHECK(near2.value == doctest::Approx(exact.value).epsilon(1e-7));
}

TEST_CASE("newton solver rejects out-of-range targets") {
  // Upper branch needs target > a_ii^alpha.
  const auto r1 = newton_solve_offdiag(0.5, 1.0, 1.5, true, 1e-10, 1.5);
  CHECK_FALSE(r1.ok);
  CHECK(std::string(r1.failure).find("admissible") != std::string::npos);
  // Lower branch needs |target| < a_ii^alpha.
  const auto r2 = newton_solve_offdiag(1.5, 1.0, 1.5, false, 1e-10, 0.5);
  CHECK_FALSE(r2.ok);
  const auto r3 = newton_solve_offdiag(-0.99, 1.0, 1.5, false, 1e-10, 0.5);
  CHECK(r3.ok);
  CHECK(r3.value > 0.0);
  CHECK(r3.value < 1.0);
}

TEST_CASE("nonexistence is reported with the failing equation") {
  try {
    solve_coefficients(0.5, 0.3, 1, 7);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("equation") != std::string::npos);
  }
}

TEST_CASE("existence frontier scan matches direct solves") {
  const std::vector<double> alphas{0.4, 0.8, 1.2, 1.6, 2.0};
  const std::vector<double> hursts{0.2, 0.5, 0.8};
  const auto cells = scan_existence_frontier(alphas, hursts, 1, 7);
  REQUIRE(cells.size() == alphas.size() * hursts.size());
  int exist_count = 0;
  for (const auto& c : cells) {
    bool direct = true;
    try {
      solve_coefficients(c.alpha, c.hurst, 1, 7);
    } catch (const NumericError&) {
      direct = false;
    }
    CHECK(c.exists == direct);
    CHECK(c.exists == c.first_failure.empty());
    if (c.exists) ++exist_count;
  }
  // The box straddles the frontier: both outcomes must be present.
  CHECK(exist_count > 0);
  CHECK(exist_count < static_cast<int>(cells.size()));

  // Within each hurst row, existence is monotone in alpha on this grid: once
  // solvable, larger alpha stays solvable.
  for (std::size_t row = 0; row < hursts.size(); ++row) {
    bool seen = false;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      const bool e = cells[row * alphas.size() + k].exists;
      if (seen) CHECK(e);
      seen = seen || e;
    }
  }
}

TEST_CASE("coefficient cache returns shared immutable entries") {
  auto& cache = CoefficientCache::global();
  cache.clear();
  const auto a = cache.get(1.5, 0.8, 1, 5);
  const auto b = cache.get(1.5, 0.8, 1, 5);
  CHECK(a.get() == b.get());
  CHECK(cache.size() == 1);

  // Hammer the same key from several threads; all must agree on one entry.
  std::vector<std::thread> pool;
  std::vector<const DecompositionCoeffs*> seen(8, nullptr);
  for (int k = 0; k < 8; ++k)
    pool.emplace_back([&cache, &seen, k] {
      seen[static_cast<std::size_t>(k)] = cache.get(1.9, 0.6, 1, 8).get();
    });
  for (auto& th : pool) th.join();
  for (const auto* ptr : seen) CHECK(ptr == seen[0]);
  CHECK(cache.size() == 2);
  cache.clear();
  CHECK(cache.size() == 0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(solve_coefficients(1.5, 0.5, 0, 3), InputError);
  CHECK_THROWS_AS(solve_coefficients(1.5, 0.5, 1, 0), InputError);
  CHECK_THROWS_AS(solve_coefficients(2.5, 0.5, 1, 3), InputError);
  CHECK_THROWS_AS(solve_coefficients(1.5, 0.5, 1, 3, 0.0), InputError);
}
