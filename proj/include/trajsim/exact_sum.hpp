#pragma once

#include <cmath>
#include <boost/container/small_vector.hpp>

namespace trajsim {

// Error-free floating-point accumulator (Shewchuk partials, as in Python's
// math.fsum). The partials always represent the exact sum of every value added,
// so `value()` is the correctly rounded total no matter how the inputs were
// split across accumulators or in which order they arrived. Finite inputs only.
class ExactSum {
 public:
  void add(double x) {
    std::size_t kept = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[kept++] = lo;
      x = hi;
    }
    partials_.resize(kept);
    partials_.push_back(x);
  }

  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }

  void merge(const ExactSum& other) {
    for (double p : other.partials_) add(p);
  }

  double value() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Round-half-even fix-up when the remaining partials push lo past a tie.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  boost::container::small_vector<double, 4> partials_;
};

}  // namespace trajsim
