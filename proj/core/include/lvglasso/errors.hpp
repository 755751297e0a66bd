#pragma once

#include <stdexcept>

namespace lvglasso {

// Numeric breakdown: Cholesky on an indefinite matrix, solver divergence.
// Plain input validation throws std::invalid_argument instead.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lvglasso
