#pragma once

#include <cmath>
#include <cstddef>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"
#include "erexp/search.hpp"

namespace erexp {

// Two-parameter reference bound
//   E1(R, T) = max over 0 <= s <= rho <= 1 of E0(s, rho) - rho*R - s*T,
// evaluated by a dense grid over the feasible triangle plus local refinement.
// This is deliberately independent of the gamma-based machinery so the two
// bounds can cross-check each other.

struct forney_result {
  double value = 0.0;
  double s = 0.0;
  double rho = 0.0;
  bool at_origin = true;  // optimum stayed at (0,0), i.e. the bound is vacuous
};

struct forney_options {
  int grid = 400;    // points per axis of the coarse pass
  int rounds = 6;    // local refinement rounds
  double zoom = 4.0; // window shrink factor per round
};

// E0(s, rho) = -ln sum_y [sum_x P(x) P(y|x)^(1-s)] * [sum_x P(x) P(y|x)^(s/rho)]^rho.
// Needs rho > 0; the (0,0) corner is handled by the maximizer as value 0.
inline double e0_forney(const ensemble& ens, double s, double rho) {
  if (!(rho > 0.0)) throw domain_error("e0_forney: rho must be positive");
  const std::size_t nx = ens.nx();
  const std::size_t ny = ens.ny();
  const double t_a = 1.0 - s;
  const double t_b = s / rho;
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const double w = ens.channel(x, y);
      a += ens.input(x) * std::pow(w, t_a);
      b += ens.input(x) * std::pow(w, t_b);
    }
    total += a * std::pow(b, rho);
  }
  return -std::log(total);
}

// Gallager's random-coding E0:
//   E0(rho) = -ln sum_y [sum_x P(x) P(y|x)^(1/(1+rho))]^(1+rho).
inline double e0_gallager(const ensemble& ens, double rho) {
  if (!(rho >= 0.0)) throw domain_error("e0_gallager: rho must be nonnegative");
  const std::size_t nx = ens.nx();
  const std::size_t ny = ens.ny();
  const double t = 1.0 / (1.0 + rho);
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double a = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      a += ens.input(x) * std::pow(ens.channel(x, y), t);
    }
    total += std::pow(a, 1.0 + rho);
  }
  return -std::log(total);
}

inline forney_result e1_forney(const ensemble& ens, double rate, double threshold,
                               const forney_options& opts = {}) {
  if (rate < 0.0) throw rate_out_of_range("rate must be nonnegative");
  if (threshold < 0.0) throw invalid_threshold("threshold must be nonnegative");

  auto objective = [&](double s, double rho) {
    return e0_forney(ens, s, rho) - rho * rate - s * threshold;
  };

  // Incumbent starts at the vacuous corner; grid points must beat it strictly,
  // which also resolves ties toward smaller rho, then smaller s.
  forney_result best;
  const int n = opts.grid;
  for (int j = 1; j <= n; ++j) {
    const double rho = static_cast<double>(j) / n;
    for (int i = 0; i <= j; ++i) {
      const double s = static_cast<double>(i) / n;
      const double v = objective(s, rho);
      if (v > best.value) {
        best = {v, s, rho, false};
      }
    }
  }

  double half = 1.0 / n;
  constexpr int kPerAxis = 16;  // 17 points per axis per window
  for (int round = 0; round < opts.rounds; ++round) {
    const double s0 = best.s;
    const double r0 = best.rho;
    for (int j = 0; j <= kPerAxis; ++j) {
      double rho = r0 - half + 2.0 * half * j / kPerAxis;
      if (rho > 1.0) rho = 1.0;
      if (rho < 1e-12) continue;  // rho = 0 is only feasible as the corner
      for (int i = 0; i <= kPerAxis; ++i) {
        double s = s0 - half + 2.0 * half * i / kPerAxis;
        if (s < 0.0) s = 0.0;
        if (s > rho) continue;
        const double v = objective(s, rho);
        if (v > best.value) {
          best = {v, s, rho, false};
        }
      }
    }
    half /= opts.zoom;
  }
  return best;
}

struct gallager_result {
  double value = 0.0;
  double rho = 0.0;
};

// E_r(R) = max over rho in [0,1] of E0(rho) - rho*R.  E0 is concave in rho,
// so ternary search plus the two endpoints covers boundary optima.
inline gallager_result er_gallager(const ensemble& ens, double rate, double tol = 1e-9) {
  if (rate < 0.0) throw rate_out_of_range("rate must be nonnegative");
  auto objective = [&](double rho) { return e0_gallager(ens, rho) - rho * rate; };
  maximum inner = maximize_concave(objective, 0.0, 1.0, tol);
  gallager_result res{inner.value, inner.arg};
  const double at_one = objective(1.0);
  if (at_one > res.value) res = {at_one, 1.0};
  if (res.value < 0.0) res = {0.0, 0.0};  // rho = 0 gives exactly 0
  return res;
}

}  // namespace erexp
