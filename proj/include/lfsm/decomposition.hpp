#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lfsm {

// Lower-triangular coefficients a[i][j], 0 <= j <= i < d, representing the
// process at integer times t, t+1, ..., t+d-1 as combinations of d
// independent unit-scale stable innovations: the rows reproduce every
// pairwise codifference of the process exactly. Diagonal entries are
// positive; columns are monotone in the row index (increasing for
// hurst > 1/alpha, decreasing below).
struct DecompositionCoeffs {
  double alpha = 2.0;
  double hurst = 0.5;
  std::int64_t t = 1;
  int d = 1;
  double kernel_pow = 1.0;  // K^alpha used on the right-hand sides
  std::vector<double> a;    // row-major lower triangle, a[i*(i+1)/2 + j]

  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * (i + 1) / 2 + j]; }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * (i + 1) / 2 + j]; }
};

struct EquationStat {
  int i = 0, j = 0;
  int iterations = 0;     // 0 for closed-form entries
  double residual = 0.0;  // |f(a_ij) - target| at the accepted root
};

struct SolveReport {
  double max_residual = 0.0;
  int total_iterations = 0;
  std::vector<EquationStat> equations;
};

struct NewtonOutcome {
  bool ok = false;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  const char* failure = nullptr;  // set when !ok
};

// Root of |z|^alpha - |z - a_ii|^alpha = target on the branch the system
// needs: z > a_ii when upper_branch (hurst > 1/alpha, where the map is
// increasing onto (a_ii^alpha, inf)), z in (0, a_ii) otherwise (decreasing,
// range (-inf, a_ii^alpha) intersected with the admissible targets).
// Newton iteration from `init` with a bisection fallback that keeps a
// bracket; alpha = 2 is solved in closed form, z = (target + a_ii^2) /
// (2 a_ii), with no iteration. Fails (ok = false) when the target is outside
// the range of the branch or the residual tolerance is not reached within
// 100 iterations.
NewtonOutcome newton_solve_offdiag(double target, double a_ii, double alpha,
                                   bool upper_branch, double tol, double init);

// Cascade solve of the triangular system for given parameters. t >= 1,
// d >= 1. Throws NumericError when the system has no solution at these
// parameters (a diagonal right-hand side turns nonpositive, an off-diagonal
// target leaves its admissible interval, or the column monotonicity fails),
// naming the offending equation. hurst within 1e-12 of 1/alpha is exact:
// a[i][0] = t^{1/alpha}, every other entry 1.
DecompositionCoeffs solve_coefficients(double alpha, double hurst,
                                       std::int64_t t, int d,
                                       double tol = 1e-10,
                                       SolveReport* report = nullptr);

struct FrontierCell {
  double alpha = 0.0;
  double hurst = 0.0;
  bool exists = false;
  std::string first_failure;  // empty when the solve went through
};

// Existence map of the decomposition over a parameter grid, by attempting
// the solve in every cell and recording where and how it first fails.
std::vector<FrontierCell> scan_existence_frontier(std::span<const double> alphas,
                                                  std::span<const double> hursts,
                                                  std::int64_t t, int d);

// Process-wide memo for solved coefficient systems, keyed by the exact
// parameter tuple. Lookups are mutex-guarded; entries are immutable once
// inserted, so shared_ptr handles stay valid with no further locking.
class CoefficientCache {
 public:
  static CoefficientCache& global();

  std::shared_ptr<const DecompositionCoeffs> get(double alpha, double hurst,
                                                 std::int64_t t, int d);
  void clear();
  std::size_t size() const;

 private:
  struct Impl;
  CoefficientCache();
  std::unique_ptr<Impl> impl_;
};

}  // namespace lfsm
