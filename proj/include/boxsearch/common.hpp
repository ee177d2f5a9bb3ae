#pragma once

#include <stdexcept>
#include <string>

namespace boxsearch {

// Thrown instead of std::invalid_argument when a prior's masses increase
// somewhere: callers must fix the ordering themselves, we never sort.
class OrderViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A survival matrix was truncated before the positive part of its support
// ended and carries no tail bound, so no honest bracket exists.
class IncompleteMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulated trial exceeded the hard step cap for a strategy that should
// have terminated long before.  Indicates a bug, not bad input.
class RunawayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal solve produced a result that fails its own consistency
// check (e.g. a schedule column that does not meet its budget).
class SolveError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Kahan accumulator over long double.  Sums that feed golden-value
// comparisons at 1e-12 go through this; naive += drifts past that for
// 1e5-term series.
class KahanSum {
 public:
  void add(long double v) {
    long double y = v - carry_;
    long double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return static_cast<double>(sum_); }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

// x^k for small integer k; survival powers dominate the evaluators, so
// skip the libm pow path.
inline double ipow(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

// Certified enclosure of an expected search time: lower is a truncated
// series, upper adds a proven tail bound.
struct TimeBracket {
  double lower = 0.0;
  double upper = 0.0;
  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

}  // namespace boxsearch
