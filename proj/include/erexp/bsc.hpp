#pragma once

#include <cmath>

#include "erexp/errors.hpp"
#include "erexp/exponents.hpp"
#include "erexp/search.hpp"

// Closed forms for the binary symmetric channel with uniform inputs: the
// Gilbert-Varshamov radius, the tilted crossover, the two exponent curves
// F (moment branch) and G (linear branch), their stationary points s1/s2, and
// the regime selection that picks the maximizing s without any search.

namespace erexp::bsc {

constexpr double kLn2 = 0.6931471805599453;

inline void require_crossover(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw invalid_ensemble("BSC crossover probability must lie in (0, 0.5)");
  }
}

// beta = ln((1-p)/p), the log-likelihood slope per flipped bit.
inline double beta(double p) {
  require_crossover(p);
  return std::log((1.0 - p) / p);
}

// h(d) = -d ln d - (1-d) ln(1-d) in nats, with h(0) = h(1) = 0 by continuity.
inline double binary_entropy(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw domain_error("binary_entropy: argument must lie in [0,1]");
  }
  if (delta == 0.0 || delta == 1.0) return 0.0;
  return -delta * std::log(delta) - (1.0 - delta) * std::log(1.0 - delta);
}

// The smaller root of h(delta) = ln 2 - R, i.e. the Gilbert-Varshamov
// distance; bisection on [0, 1/2] where h is increasing.
inline double gv_distance(double rate) {
  if (!(rate >= 0.0 && rate <= kLn2)) {
    throw rate_out_of_range("gv_distance: rate must lie in [0, ln 2]");
  }
  if (rate == 0.0) return 0.5;
  if (rate == kLn2) return 0.0;
  const double target = kLn2 - rate;
  return bisect_increasing([&](double d) { return binary_entropy(d) - target; }, 0.0, 0.5,
                           1e-13, 1e-12);
}

// p_s = p^s / (p^s + (1-p)^s) = 1 / (1 + e^{beta*s}); valid for any real s.
inline double p_tilt(double p, double s) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("p_tilt: p must lie in (0,1)");
  return 1.0 / (1.0 + std::exp(std::log((1.0 - p) / p) * s));
}

// ln[p^s + (1-p)^s] evaluated without underflow as s ln(1-p) + ln(1+e^{-beta*s}).
inline double log_tilt_norm(double p, double s) {
  return s * std::log(1.0 - p) + std::log1p(std::exp(-beta(p) * s));
}

inline void require_rate(double p, double rate) {
  require_crossover(p);
  const double cap = kLn2 - binary_entropy(p);
  if (!(rate >= 0.0 && rate < cap)) {
    throw rate_out_of_range("rate must lie in [0, ln2 - h(p))");
  }
}

// mu0(s, R) = s ln(1-p) - ln[p^s + (1-p)^s] + ln 2 - R, the enumerator-moment
// exponent at the tilted distance.
inline double mu0(double p, double rate, double s) {
  require_rate(p, rate);
  return kLn2 - std::log1p(std::exp(-beta(p) * s)) - rate;
}

// The closed-form s_R: the tilt at which the tilted crossover p_s equals the
// Gilbert-Varshamov distance.
inline double s_r(double p, double rate) {
  require_rate(p, rate);
  const double d = gv_distance(rate);
  if (d >= 0.5) return 0.0;  // rate 0
  return std::log((1.0 - d) / d) / beta(p);
}

// mu(s, R): mu0 above s_R, linear continuation beta*s*delta_GV below.
inline double mu(double p, double rate, double s) {
  if (s < 0.0) throw domain_error("mu: s must be nonnegative");
  if (s >= s_r(p, rate)) return mu0(p, rate, s);
  return beta(p) * s * gv_distance(rate);
}

// F(s) = mu0(s,R) + s ln(1/(1-p)) - ln[p^{1-s} + (1-p)^{1-s}] - sT,
// the bound along the curved branch.
inline double curve_f(double p, double rate, double threshold, double s) {
  return mu0(p, rate, s) + s * std::log(1.0 / (1.0 - p)) - log_tilt_norm(p, 1.0 - s) -
         s * threshold;
}

// G(s): same with the linear branch exponent beta*s*delta_GV in place of mu0.
inline double curve_g(double p, double rate, double threshold, double s) {
  return beta(p) * s * gv_distance(rate) + s * std::log(1.0 / (1.0 - p)) -
         log_tilt_norm(p, 1.0 - s) - s * threshold;
}

// Stationary point of G: [1 - (1/beta) ln((beta(1-d)+T)/(beta*d-T))]+ with
// d = delta_GV(R).  When T >= beta*d the bound along G vanishes and s1 = 0.
inline double s1(double p, double rate, double threshold) {
  if (threshold < 0.0) throw invalid_threshold("threshold must be nonnegative");
  const double b = beta(p);
  const double d = gv_distance(rate);
  if (b * d - threshold <= 0.0) return 0.0;
  const double v = 1.0 - std::log((b * (1.0 - d) + threshold) / (b * d - threshold)) / b;
  return v > 0.0 ? v : 0.0;
}

// Stationary point of F: s2 = (1/beta) ln z0 with
// z0 = (sqrt(T^2 + 4p(1-p)(beta^2 - T^2)) - T) / (2p(T + beta)).
// Requires T < beta; beyond that the decoder always erases.
inline double s2(double p, double threshold) {
  if (threshold < 0.0) throw invalid_threshold("threshold must be nonnegative");
  const double b = beta(p);
  if (threshold >= b) {
    throw threshold_too_large("s2: threshold must be below beta = ln((1-p)/p)");
  }
  const double t = threshold;
  const double z0 = (std::sqrt(t * t + 4.0 * p * (1.0 - p) * (b * b - t * t)) - t) /
                    (2.0 * p * (t + b));
  return std::log(z0) / b;
}

enum class active_curve { f, g };

struct regime_info {
  double s_r = 0.0;
  int slope_sign = 0;  // sign of F'(s_R)
  double s_opt = 0.0;
  active_curve curve = active_curve::f;
};

// Sign of F'(s_R) = beta*(p_{s_R} - p_{1-s_R}) - T decides which curve carries
// the maximum: positive pushes the optimum right of s_R (curve F, s2),
// negative pulls it left (curve G, s1), zero stays at the knee.
inline regime_info regime(double p, double rate, double threshold) {
  if (threshold < 0.0) throw invalid_threshold("threshold must be nonnegative");
  require_rate(p, rate);
  regime_info info;
  info.s_r = s_r(p, rate);
  const double d = gv_distance(rate);  // equals p_tilt(p, s_R)
  const double slope = beta(p) * (d - p_tilt(p, 1.0 - info.s_r)) - threshold;
  if (std::fabs(slope) <= 1e-10) {
    info.slope_sign = 0;
    info.s_opt = info.s_r;
    info.curve = active_curve::f;
  } else if (slope > 0.0) {
    info.slope_sign = 1;
    info.s_opt = s2(p, threshold);
    info.curve = active_curve::f;
  } else {
    info.slope_sign = -1;
    info.s_opt = s1(p, rate, threshold);
    info.curve = active_curve::g;
  }
  return info;
}

// Closed-form counterpart of the generic e1_star on the BSC ensemble.
inline exponent_result e1_star_bsc(double p, double rate, double threshold) {
  const regime_info info = regime(p, rate, threshold);
  exponent_result res;
  res.s_r = info.s_r;
  res.s_opt = info.s_opt;
  const double value = info.curve == active_curve::f
                           ? curve_f(p, rate, threshold, info.s_opt)
                           : curve_g(p, rate, threshold, info.s_opt);
  res.e1_star = value > 0.0 ? value : 0.0;
  if (value <= 0.0) res.s_opt = 0.0;
  // Same branch rule as the generic searcher so the two agree field for field.
  res.branch = res.s_opt >= res.s_r ? lambda_branch::gamma : lambda_branch::linear;
  res.e2_star = res.e1_star + threshold;
  return res;
}

}  // namespace erexp::bsc
