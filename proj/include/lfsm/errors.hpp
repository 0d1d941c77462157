#pragma once

#include <stdexcept>
#include <string>

namespace lfsm {

// Bad arguments or malformed data supplied by the caller. The CLI maps this
// to exit code 1.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that was asked for but cannot be completed: quadrature that
// fails to converge, a coefficient system with no solution, an estimator that
// lands outside its admissible range. The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lfsm
