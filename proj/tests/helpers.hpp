#pragma once

#include <cmath>
#include <vector>

#include "erexp/ensemble.hpp"

namespace testing_support {

// Three-letter channel used across suites.  It satisfies the output-symmetry
// property: for every s, sum_x P(x) P^s(y|x) is the same for both outputs.
inline erexp::ensemble ternary_example() {
  return erexp::ensemble({0.2, 0.4, 0.4},
                         {{0.5, 0.5}, {0.3, 0.7}, {0.7, 0.3}});
}

// Same input distribution with a perturbed middle row; breaks symmetry.
inline erexp::ensemble ternary_asymmetric() {
  return erexp::ensemble({0.2, 0.4, 0.4},
                         {{0.5, 0.5}, {0.2, 0.8}, {0.7, 0.3}});
}

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

// Five-point central difference, error O(h^4).
template <typename F>
double derivative(F f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

}  // namespace testing_support
