#pragma once

#include <stdexcept>
#include <string>

namespace quadinv {

// Error categories. The CLI maps these onto exit codes:
// UsageError -> 1, DataError -> 2, NumericalError (and subclasses) -> 3.

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : NumericalError {
  using NumericalError::NumericalError;
};

/// No candidate active set produced a feasible, dual-feasible KKT point.
struct NoSolutionError : NumericalError {
  NoSolutionError(const std::string& what, bool region_empty, int singular_skips)
      : NumericalError(what), feasible_region_empty(region_empty), singular_kkt_skips(singular_skips) {}

  bool feasible_region_empty;
  int singular_kkt_skips;
};

/// A constructed object violated an invariant it must satisfy by construction.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace quadinv
