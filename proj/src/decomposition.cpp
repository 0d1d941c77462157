#include "lfsm/decomposition.hpp"

#include "lfsm/errors.hpp"
#include "lfsm/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace lfsm {

namespace {

constexpr double kXiSnap = 1e-12;
constexpr int kMaxNewtonIters = 100;

double pow_abs(double x, double alpha) {
  return std::pow(std::fabs(x), alpha);
}

[[noreturn]] void fail_equation(double alpha, double hurst, int i, int j,
                                const std::string& why) {
  std::ostringstream os;
  os << "solve_coefficients(alpha=" << alpha << ", hurst=" << hurst
     << "): equation (" << i << "," << j << ") " << why;
  throw NumericError(os.str());
}

}  // namespace

NewtonOutcome newton_solve_offdiag(double target, double a_ii, double alpha,
                                   bool upper_branch, double tol,
                                   double init) {
  NewtonOutcome out;
  if (!(a_ii > 0.0)) {
    out.failure = "diagonal pivot is not positive";
    return out;
  }

  const double apow = std::pow(a_ii, alpha);
  if (alpha == 2.0) {
    // f(z) = z^2 - (z - a)^2 = 2 a z - a^2 is linear; no iteration needed.
    const double z = (target + apow) / (2.0 * a_ii);
    out.value = z;
    out.residual = std::fabs(pow_abs(z, 2.0) - pow_abs(z - a_ii, 2.0) - target);
    if (upper_branch ? (z > a_ii) : (z > 0.0 && z < a_ii)) {
      out.ok = true;
    } else {
      out.failure = "target outside the admissible range";
    }
    return out;
  }

  // f(z) = z^alpha - |z - a_ii|^alpha. Upper branch: increasing from
  // f(a_ii) = a_ii^alpha to +inf on (a_ii, inf). Lower branch: f(0) = -apow,
  // f(a_ii) = +apow, strictly increasing on (0, a_ii) as well (both terms
  // increase). Reject targets outside those open ranges before iterating.
  if (upper_branch ? !(target > apow) : !(std::fabs(target) < apow)) {
    out.failure = "target outside the admissible range";
    return out;
  }

  auto f = [&](double z) {
    return pow_abs(z, alpha) - pow_abs(z - a_ii, alpha) - target;
  };
  auto fprime = [&](double z) {
    const double sgn = z >= a_ii ? 1.0 : -1.0;
    return alpha * (std::pow(z, alpha - 1.0) -
                    sgn * pow_abs(z - a_ii, alpha - 1.0));
  };

  // Expanding search for an upper bracket end; the lower branch is already
  // bracketed by (0, a_ii).
  double lo, hi;
  if (upper_branch) {
    lo = a_ii;
    hi = std::max(init, a_ii * 2.0);
    while (f(hi) < 0.0) {
      hi *= 2.0;
      if (!std::isfinite(hi)) {
        out.failure = "bracket expansion overflowed";
        return out;
      }
    }
  } else {
    lo = 0.0;
    hi = a_ii;
  }

  double z = init;
  if (!(z > lo) || !(z < hi)) z = 0.5 * (lo + hi);

  for (int iter = 1; iter <= kMaxNewtonIters; ++iter) {
    out.iterations = iter;
    const double fz = f(z);
    out.residual = std::fabs(fz);
    if (out.residual <= tol) {
      out.ok = true;
      out.value = z;
      return out;
    }
    if (fz > 0.0) hi = z; else lo = z;

    const double dz = fprime(z);
    double next = (std::isfinite(dz) && dz != 0.0) ? z - fz / dz : lo;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  out.value = z;
  out.failure = "no convergence within the iteration budget";
  return out;
}

DecompositionCoeffs solve_coefficients(double alpha, double hurst,
                                       std::int64_t t, int d, double tol,
                                       SolveReport* report) {
  LfsmParams{alpha, hurst, 1.0}.validate();
  if (t < 1) throw InputError("solve_coefficients: t must be >= 1");
  if (d < 1) throw InputError("solve_coefficients: d must be >= 1");
  if (!(tol > 0.0)) throw InputError("solve_coefficients: tol must be > 0");

  DecompositionCoeffs C;
  C.alpha = alpha;
  C.hurst = hurst;
  C.t = t;
  C.d = d;
  C.a.assign(static_cast<std::size_t>(d) * (d + 1) / 2, 0.0);
  if (report) *report = SolveReport{};

  const double xi = hurst - 1.0 / alpha;
  if (std::fabs(xi) < kXiSnap) {
    // Independent increments: time t contributes t^{1/alpha} through the
    // first innovation, every later step is one fresh unit innovation.
    C.kernel_pow = 1.0;
    const double root = std::pow(static_cast<double>(t), 1.0 / alpha);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) C.at(i, j) = j == 0 ? root : 1.0;
    return C;
  }

  C.kernel_pow = kernel_constant_pow(alpha, hurst);
  const double ah = alpha * hurst;
  const bool upper = xi > 0.0;

  // Scale diagnostics relative to the largest magnitude on the diagonal row,
  // so tolerances mean the same thing at every t.
  auto scale_pow = [&](std::int64_t time) {
    return C.kernel_pow * std::pow(static_cast<double>(time), ah);
  };

  for (int i = 0; i < d; ++i) {
    // Diagonal: |a_ii|^alpha = K^alpha (t+i)^{alpha h} - sum_{j<i} |a_ij|^alpha.
    double rhs = scale_pow(t + i);
    for (int j = 0; j < i; ++j) rhs -= pow_abs(C.at(i, j), alpha);
    if (!(rhs > 0.0))
      fail_equation(alpha, hurst, i, i,
                    "diagonal right-hand side is not positive (" +
                        std::to_string(rhs) + ")");
    C.at(i, i) = std::pow(rhs, 1.0 / alpha);
    if (report)
      report->equations.push_back({i, i, 0, 0.0});

    // Column i of the rows below, walked downward so each equation can start
    // from the entry just above it.
    for (int ip = i + 1; ip < d; ++ip) {
      double target = C.kernel_pow *
                      (std::pow(static_cast<double>(t + ip), ah) -
                       std::pow(static_cast<double>(ip - i), ah));
      for (int j = 0; j < i; ++j)
        target -= pow_abs(C.at(ip, j), alpha) -
                  pow_abs(C.at(ip, j) - C.at(i, j), alpha);

      const double prev = ip == i + 1 ? C.at(i, i) : C.at(ip - 1, i);
      const double init = prev * (upper ? 1.0 + 1e-3 : 1.0 - 1e-3);
      const NewtonOutcome res = newton_solve_offdiag(
          target, C.at(i, i), alpha, upper, tol, init);
      if (!res.ok)
        fail_equation(alpha, hurst, ip, i, res.failure);
      C.at(ip, i) = res.value;
      if (report) {
        report->equations.push_back({ip, i, res.iterations, res.residual});
        report->total_iterations += res.iterations;
        report->max_residual = std::max(report->max_residual, res.residual);
      }

      // The solved column must keep the theorem's ordering; a violation here
      // means the parameters sit past the representability frontier even
      // though each single equation was solvable.
      const bool ordered = upper ? C.at(ip, i) >= prev : C.at(ip, i) <= prev;
      if (!ordered)
        fail_equation(alpha, hurst, ip, i, "column monotonicity violated");
    }
  }
  return C;
}

std::vector<FrontierCell> scan_existence_frontier(
    std::span<const double> alphas, std::span<const double> hursts,
    std::int64_t t, int d) {
  std::vector<FrontierCell> cells;
  cells.reserve(alphas.size() * hursts.size());
  for (double h : hursts) {
    for (double a : alphas) {
      FrontierCell cell;
      cell.alpha = a;
      cell.hurst = h;
      try {
        solve_coefficients(a, h, t, d);
        cell.exists = true;
      } catch (const NumericError& e) {
        cell.first_failure = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

struct CoefficientCache::Impl {
  using Key = std::tuple<double, double, std::int64_t, int>;
  mutable std::mutex mu;
  std::map<Key, std::shared_ptr<const DecompositionCoeffs>> entries;
};

CoefficientCache::CoefficientCache() : impl_(new Impl) {}

CoefficientCache& CoefficientCache::global() {
  static CoefficientCache cache;
  return cache;
}

std::shared_ptr<const DecompositionCoeffs> CoefficientCache::get(
    double alpha, double hurst, std::int64_t t, int d) {
  const Impl::Key key{alpha, hurst, t, d};
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->entries.find(key);
    if (it != impl_->entries.end()) return it->second;
  }
  // Solve outside the lock; concurrent solvers of the same key waste a bit
  // of work but never block each other on the numerics.
  auto solved =
      std::make_shared<const DecompositionCoeffs>(solve_coefficients(alpha, hurst, t, d));
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto [it, inserted] = impl_->entries.emplace(key, std::move(solved));
  (void)inserted;
  return it->second;
}

void CoefficientCache::clear() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->entries.clear();
}

std::size_t CoefficientCache::size() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->entries.size();
}

}  // namespace lfsm
