#pragma once

#include <stdexcept>
#include <string>

namespace miqubo {

/// Bad user input: malformed files, missing columns, out-of-range knobs.
/// The CLI maps this to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its stopping criterion.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double final_violation)
      : std::runtime_error(what), final_violation_(final_violation) {}
  double final_violation() const noexcept { return final_violation_; }

 private:
  double final_violation_;
};

/// A heuristic backend returned no sample of the requested cardinality.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace miqubo
