#pragma once

// Cell rules of the DP measures. Each kernel gives the value of the boundary
// cells (row 0 / column 0) and of an inner cell (i, j >= 1, 1-based point
// indices) from its three predecessors. The sequential row-major fill and the
// anti-diagonal wavefront both evaluate exactly these functions on exactly the
// same neighbour values, which is what makes their results bit-identical.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trajsim/errors.hpp"
#include "trajsim/measures.hpp"

namespace trajsim::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DtwKernel {
  const Trajectory& a;
  const Trajectory& b;

  double boundary(std::size_t i, std::size_t j) const { return (i == 0 && j == 0) ? 0.0 : kInf; }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    return distance(a[i - 1], b[j - 1]) + std::min({diag, up, left});
  }
};

struct FrechetKernel {
  const Trajectory& a;
  const Trajectory& b;

  double boundary(std::size_t i, std::size_t j) const { return (i == 0 && j == 0) ? 0.0 : kInf; }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    return std::max(distance(a[i - 1], b[j - 1]), std::min({diag, up, left}));
  }
};

struct ErpKernel {
  const Trajectory& a;
  const Trajectory& b;
  Point gap;
  // Prefix sums of gap distances: the boundary row and column.
  std::vector<double> row0;
  std::vector<double> col0;

  ErpKernel(const Trajectory& a_, const Trajectory& b_, const Point& g) : a(a_), b(b_), gap(g) {
    col0.assign(a.size() + 1, 0.0);
    for (std::size_t i = 1; i <= a.size(); ++i) col0[i] = col0[i - 1] + distance(a[i - 1], gap);
    row0.assign(b.size() + 1, 0.0);
    for (std::size_t j = 1; j <= b.size(); ++j) row0[j] = row0[j - 1] + distance(b[j - 1], gap);
  }

  double boundary(std::size_t i, std::size_t j) const { return i == 0 ? row0[j] : col0[i]; }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    const Point& p = a[i - 1];
    const Point& q = b[j - 1];
    return std::min({diag + distance(p, q), up + distance(p, gap), left + distance(q, gap)});
  }
};

struct EdrKernel {
  const Trajectory& a;
  const Trajectory& b;
  double eps;

  double boundary(std::size_t i, std::size_t j) const { return static_cast<double>(i + j); }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    const double sub = distance(a[i - 1], b[j - 1]) <= eps ? 0.0 : 1.0;
    return std::min({diag + sub, up + 1.0, left + 1.0});
  }
};

struct StedrKernel {
  const Trajectory& a;
  const Trajectory& b;
  double eps;
  double eps_t;

  double boundary(std::size_t i, std::size_t j) const { return static_cast<double>(i + j); }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    const Point& p = a[i - 1];
    const Point& q = b[j - 1];
    const bool match = distance(p, q) <= eps && std::fabs(*p.t - *q.t) <= eps_t;
    return std::min({diag + (match ? 0.0 : 1.0), up + 1.0, left + 1.0});
  }
};

struct LcssKernel {
  const Trajectory& a;
  const Trajectory& b;
  double eps;

  double boundary(std::size_t, std::size_t) const { return 0.0; }
  double cell(std::size_t i, std::size_t j, double diag, double up, double left) const {
    if (distance(a[i - 1], b[j - 1]) <= eps) return diag + 1.0;
    return std::max(up, left);
  }
};

/// Calls `fn(kernel)` with the kernel for a DP measure. Parameters must be validated.
template <class Fn>
decltype(auto) with_dp_kernel(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, Fn&& fn) {
  const MeasureParams& p = spec.params;
  switch (spec.kind) {
    case MeasureKind::kDtw:
      return fn(DtwKernel{a, b});
    case MeasureKind::kFrechet:
      return fn(FrechetKernel{a, b});
    case MeasureKind::kErp:
      return fn(ErpKernel(a, b, *p.gap_point));
    case MeasureKind::kEdr:
      return fn(EdrKernel{a, b, *p.eps_spatial});
    case MeasureKind::kStedr:
      return fn(StedrKernel{a, b, *p.eps_spatial, *p.eps_temporal});
    case MeasureKind::kLcss:
      return fn(LcssKernel{a, b, *p.eps_spatial});
    default:
      throw ParameterError(std::string(measure_name(spec.kind)) + " is not a DP measure");
  }
}

/// Row-major fill with two rolling rows.
template <class Kernel>
double dp_sequential(const Kernel& k, std::size_t n, std::size_t m) {
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = k.boundary(0, j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = k.boundary(i, 0);
    for (std::size_t j = 1; j <= m; ++j) cur[j] = k.cell(i, j, prev[j - 1], prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[m];
}

template <class Kernel>
ScoreMatrix dp_full(const Kernel& k, std::size_t n, std::size_t m) {
  ScoreMatrix s{n + 1, m + 1, std::vector<double>((n + 1) * (m + 1))};
  auto at = [&](std::size_t i, std::size_t j) -> double& { return s.values[i * s.cols + j]; };
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      at(i, j) = (i == 0 || j == 0) ? k.boundary(i, j) : k.cell(i, j, at(i - 1, j - 1), at(i - 1, j), at(i, j - 1));
    }
  }
  return s;
}

}  // namespace trajsim::detail
