#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace erexp {

// Root of f on [lo, hi] for continuous monotone nondecreasing f with
// f(lo) <= 0 <= f(hi).  Plain bisection; returns the midpoint of the final
// bracket once its width falls below x_tol or |f(mid)| falls below f_tol.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double x_tol, double f_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    throw std::invalid_argument("bisect_increasing: root not bracketed");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    const double fm = f(mid);
    if (std::fabs(fm) <= f_tol) return mid;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double x_tol) {
  return bisect_increasing(std::forward<F>(f), lo, hi, x_tol, 0.0);
}

struct maximum {
  double arg = 0.0;
  double value = 0.0;
};

// Maximizer of a concave (or unimodal) f on [lo, hi] by ternary search.
// Shrinks the bracket to width x_tol, then evaluates at the midpoint.
// For concave f with an interior optimum the argument error is ~x_tol/2 and
// the value error is second order in it.
template <typename F>
maximum maximize_concave(F&& f, double lo, double hi, double x_tol) {
  if (!(hi >= lo)) throw std::invalid_argument("maximize_concave: empty interval");
  while (hi - lo > x_tol) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (m1 >= m2) break;  // interval at floating-point resolution
    if (f(m1) < f(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double arg = 0.5 * (lo + hi);
  return {arg, f(arg)};
}

}  // namespace erexp
