#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"
#include "erexp/forney.hpp"
#include "erexp/search.hpp"

namespace erexp {

// Which branch of the clipped exponent Lambda(R, s) is active at the optimum:
// the curved branch gamma(s) - R (s >= s_R) or the linear branch s*gamma'(s_R).
enum class lambda_branch { gamma, linear };

inline const char* to_string(lambda_branch b) {
  return b == lambda_branch::gamma ? "gamma" : "linear";
}

struct exponent_result {
  double e1_star = 0.0;  // erasure-event exponent
  double e2_star = 0.0;  // undetected-error exponent, always e1_star + T
  double s_opt = 0.0;
  double s_r = 0.0;
  lambda_branch branch = lambda_branch::gamma;
};

struct exponent_options {
  double s_max = 1.0;   // upper end of the search interval for s
  double tol = 1e-9;    // bracket width tolerance of the concave search
};

namespace detail {

// gamma(s) - s*gamma'(s) is 0 at s = 0 and increases to I(X;Y) at s = 1,
// so the rate equation has a unique root there for 0 <= R < I.
inline double rate_gap(const ensemble& ens, double s, double rate) {
  return ens.gamma(s) - s * ens.gamma_prime(s) - rate;
}

}  // namespace detail

// Solves gamma(s) - s*gamma'(s) = R for s_R in [0, 1].
inline double solve_s_r(const ensemble& ens, double rate) {
  if (rate < 0.0) throw rate_out_of_range("rate must be nonnegative");
  const double info = ens.mutual_information();
  if (rate >= info) {
    throw rate_out_of_range("rate " + std::to_string(rate) +
                            " is not below the mutual information " + std::to_string(info));
  }
  if (rate == 0.0) return 0.0;
  // For channels with zero transitions the curve is undefined at s = 0; start
  // the bracket just above and reject rates below the reachable range.
  double lo = 0.0;
  if (ens.has_zero_transition()) {
    lo = 1e-12;
    if (detail::rate_gap(ens, lo, rate) > 0.0) {
      throw rate_out_of_range("rate below the solvable range of this channel");
    }
  }
  return bisect_increasing([&](double s) { return detail::rate_gap(ens, s, rate); }, lo, 1.0,
                           1e-14, 1e-12);
}

// Lambda(R, s): gamma(s) - R beyond s_R, linear continuation s*gamma'(s_R)
// below it.  Continuous at s_R by the definition of s_R.
inline double lambda_exp(const ensemble& ens, double rate, double s) {
  const double s_r = solve_s_r(ens, rate);
  if (s >= s_r) return ens.gamma(s) - rate;
  return s * ens.gamma_prime(s_r);
}

// One point of the single-parameter bound:
//   E1(R, T, s) = Lambda(R, s) + gamma(1 - s) - s*T - ln|Y|.
inline double e1_star_at(const ensemble& ens, double rate, double threshold, double s) {
  const double s_r = solve_s_r(ens, rate);
  const double lam = s >= s_r ? ens.gamma(s) - rate : s * ens.gamma_prime(s_r);
  return lam + ens.gamma(1.0 - s) - s * threshold -
         std::log(static_cast<double>(ens.ny()));
}

// Maximizes the single-parameter bound over s in [0, s_max].  The objective is
// concave (Lambda is a min of concave functions, gamma(1-s) is concave), so a
// ternary search suffices.  The bound is 0 at s = 0, hence never negative.
inline exponent_result e1_star(const ensemble& ens, double rate, double threshold,
                               const exponent_options& opts = {}) {
  if (threshold < 0.0) throw invalid_threshold("threshold must be nonnegative");
  if (!(opts.s_max > 0.0)) throw domain_error("s_max must be positive");
  if (opts.s_max > 1.0 && ens.has_zero_transition()) {
    throw domain_error("s_max > 1 requires a channel without zero transitions");
  }
  const double s_r = solve_s_r(ens, rate);
  const double gp_r = ens.gamma_prime(s_r);
  const double log_ny = std::log(static_cast<double>(ens.ny()));
  auto objective = [&](double s) {
    const double lam = s >= s_r ? ens.gamma(s) - rate : s * gp_r;
    return lam + ens.gamma(1.0 - s) - s * threshold - log_ny;
  };
  maximum best = maximize_concave(objective, 0.0, opts.s_max, opts.tol);

  exponent_result res;
  res.s_r = s_r;
  res.s_opt = best.arg;
  res.e1_star = best.value;
  if (res.e1_star < 0.0) {  // the supremum over s >= 0 includes s = 0, value 0
    res.e1_star = 0.0;
    res.s_opt = 0.0;
  }
  // Snap to the knee.  Near a flat maximum the ternary search resolves the
  // argument only to about sqrt(ulp/|f''|) ~ 1e-8, so the window must be
  // wider than the bracket tolerance.
  if (std::fabs(res.s_opt - s_r) <= 100.0 * opts.tol) res.s_opt = s_r;
  res.branch = res.s_opt >= s_r ? lambda_branch::gamma : lambda_branch::linear;
  res.e2_star = res.e1_star + threshold;
  return res;
}

struct sweep_row {
  double rate = 0.0;
  double threshold = 0.0;
  bool ok = false;
  exponent_result result;
  std::string error;  // short reason when !ok
  std::optional<double> forney_e1;
};

struct sweep_options {
  bool with_forney = false;
  exponent_options exponent;
  forney_options forney;
};

// Evaluates the bound over the cartesian product of rates and thresholds,
// rates outermost.  Failures at individual points (rate at or above capacity,
// bad threshold) are recorded in the row instead of aborting the sweep.
inline std::vector<sweep_row> sweep(const ensemble& ens, const std::vector<double>& rates,
                                    const std::vector<double>& thresholds,
                                    const sweep_options& opts = {}) {
  std::vector<sweep_row> rows;
  rows.reserve(rates.size() * thresholds.size());
  for (double rate : rates) {
    for (double threshold : thresholds) {
      sweep_row row;
      row.rate = rate;
      row.threshold = threshold;
      try {
        row.result = e1_star(ens, rate, threshold, opts.exponent);
        row.ok = true;
        if (opts.with_forney) {
          row.forney_e1 = e1_forney(ens, rate, threshold, opts.forney).value;
        }
      } catch (const rate_out_of_range&) {
        row.error = "rate_out_of_range";
      } catch (const invalid_threshold&) {
        row.error = "invalid_threshold";
      } catch (const not_symmetric&) {
        row.error = "not_symmetric";
      } catch (const domain_error&) {
        row.error = "domain_error";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace erexp
