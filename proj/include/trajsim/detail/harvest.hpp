#pragma once

// Final aggregation of the enumeration measures from the per-point minimum
// distances: row_min[i] = min_j d(a_i, b_j), col_min[j] = min_i d(a_i, b_j).

#include <algorithm>
#include <span>

#include "trajsim/exact_sum.hpp"

namespace trajsim::detail {

inline double hausdorff_from_mins(std::span<const double> row_min, std::span<const double> col_min) {
  double h = 0.0;
  for (double v : row_min) h = std::max(h, v);
  for (double v : col_min) h = std::max(h, v);
  return h;
}

inline double owd_from_mins(std::span<const double> row_min, std::span<const double> col_min) {
  ExactSum ra, cb;
  for (double v : row_min) ra += v;
  for (double v : col_min) cb += v;
  const double ab = ra.value() / static_cast<double>(row_min.size());
  const double ba = cb.value() / static_cast<double>(col_min.size());
  return (ab + ba) / 2.0;
}

}  // namespace trajsim::detail
