#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cxshrink {

// Diagonal shrinkage profile h acting on a descending eigenvalue vector of
// length q. h_deriv returns the per-coordinate partials dh_k / df_k evaluated
// at the same point; cross-partials never enter the closed forms and are not
// represented.
struct ShrinkageProfile {
  std::size_t q = 0;
  std::function<std::vector<double>(const std::vector<double>&)> h;
  std::function<std::vector<double>(const std::vector<double>&)> h_deriv;
};

// h identically zero (the uncorrected estimator).
ShrinkageProfile zero_profile(std::size_t q);

}  // namespace cxshrink
