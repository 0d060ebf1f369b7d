#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "erexp/bsc.hpp"
#include "erexp/errors.hpp"

// Moments of the distance enumerator N(d): the number among m = round(e^{nR})
// independent uniform n-bit words that land at Hamming distance d from a fixed
// center.  N ~ Binomial(m, q_d) with q_d = C(n,d)/2^n.  The asymptotic claim
// under test says (1/n) ln E{N^s} approaches s(R + h(d/n) - ln 2) inside the
// concentration region and (R + h(d/n) - ln 2) outside it.

namespace erexp::moments {

using bsc::binary_entropy;
using bsc::kLn2;

inline double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw domain_error("log_binomial: need 0 <= k <= n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// ln q_d = ln C(n,d) - n ln 2, the log-probability that a uniform word lands
// at distance exactly d.  Exact, not the entropy approximation.
inline double log_qdelta(int n, int d) { return log_binomial(n, d) - n * kLn2; }

// Membership in the concentration region: delta_GV(R) <= delta <= 1 - delta_GV(R),
// tested through the equivalent form R + h(delta) - ln 2 >= 0 with a small
// boundary tolerance so that constructed boundary points land inside.
inline bool in_g_r(double rate, double delta) {
  if (!(rate >= 0.0 && rate <= kLn2)) throw rate_out_of_range("in_g_r: rate must lie in [0, ln 2]");
  if (!(delta >= 0.0 && delta <= 1.0)) throw domain_error("in_g_r: delta must lie in [0,1]");
  return rate + binary_entropy(delta) - kLn2 >= -1e-12;
}

// Asymptotic moment exponent in the two regimes; both branches vanish on the
// region boundary, so the prediction is continuous across it.
inline double predicted_moment_exponent(double rate, double s, double delta) {
  if (!(s > 0.0 && s <= 1.0)) throw domain_error("predicted_moment_exponent: s must lie in (0,1]");
  const double gap = rate + binary_entropy(delta) - kLn2;
  return in_g_r(rate, delta) ? s * gap : gap;
}

struct kahan_sum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct moment_oracle_result {
  double log_moment = 0.0;        // ln E{N^s}
  bool truncated_at_edge = false; // the mass window ran into the support edge
  std::uint64_t terms = 0;        // enumerated pmf terms (diagnostics)
};

namespace detail {

// Small-mean path: the moment is dominated by the first few counts, so sum
// absolute log-domain terms ln[C(m,k) q^k (1-q)^(m-k) k^s] for k = 1..k_max.
// Works for arbitrarily large m because C(m,k) enters via a running product
// of ln(m-j) factors, never via lgamma differences of huge arguments.
inline moment_oracle_result log_domain_moment(double m, double ln_q, double s, double mean) {
  const double q = std::exp(ln_q);
  // (m-k) ln(1-q) is -mean to excellent accuracy when q is tiny; otherwise
  // evaluate it directly.  k*q corrections are negligible at k <= k_max.
  const bool tiny_q = ln_q < -45.0;
  const double log_one_minus_q = tiny_q ? 0.0 : std::log1p(-q);

  double k_cap = mean + 20.0 * std::sqrt(mean + 1.0) + 60.0;
  bool edge = false;
  if (k_cap >= m) {
    k_cap = m;
    edge = true;
  }
  const std::uint64_t k_max = static_cast<std::uint64_t>(k_cap);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(std::min<double>(k_cap + 1.0, 1 << 20)));
  double log_c = 0.0;  // ln C(m, k), updated incrementally
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    log_c += std::log(m - static_cast<double>(k) + 1.0) - std::log(static_cast<double>(k));
    double t = log_c + static_cast<double>(k) * ln_q + s * std::log(static_cast<double>(k));
    t += tiny_q ? -mean : (m - static_cast<double>(k)) * log_one_minus_q;
    terms.push_back(t);
    best = std::max(best, t);
    if (t < best - 60.0 && static_cast<double>(k) > mean + 2.0) break;  // far past the peak
  }
  if (terms.empty()) throw domain_error("moment oracle: empty support");
  kahan_sum acc;
  for (double t : terms) acc.add(std::exp(t - best));
  return {best + std::log(acc.sum), edge, terms.size()};
}

}  // namespace detail

// ln E{N^s} for N ~ Binomial(m, q) with q given in logs.  Large means use an
// unnormalized recurrence u(k) across the central mass window (u = 1 at the
// mode), giving ln E = ln(sum u k^s) - ln(sum u): the window holds all but
// tail_tol of the mass, so no absolute pmf value is ever needed.  Counts
// k in {0, 1} are always part of the sum; in the concentrated regime their
// relative weight is below e^{-mean/2} and underflows to exactly zero.
inline moment_oracle_result binomial_fractional_moment(double m, double ln_q, double s,
                                                       double tail_tol = 1e-15) {
  if (!(m >= 1.0)) throw domain_error("moment oracle: population must be >= 1");
  if (!std::isfinite(m)) throw overflow_error("moment oracle: population e^{nR} overflows");
  if (!(s > 0.0 && s <= 1.0)) throw domain_error("moment oracle: s must lie in (0,1]");
  if (!(ln_q <= 0.0)) throw domain_error("moment oracle: q must lie in (0,1]");
  if (!(tail_tol > 0.0 && tail_tol < 1e-3)) throw domain_error("moment oracle: bad tail_tol");

  const double ln_mean = std::log(m) + ln_q;
  const double mean = std::exp(ln_mean);
  if (mean <= 1e4) return detail::log_domain_moment(m, ln_q, s, mean);

  const double q = std::exp(ln_q);
  const double sigma = std::sqrt(mean * (1.0 - q));
  const double est_window = 17.5 * sigma + 64.0;
  if (est_window > 6e9) {
    throw overflow_error("moment oracle: mass window of ~" + std::to_string(est_window) +
                         " terms is beyond the enumeration budget");
  }

  const double c = q / (1.0 - q);
  const bool exact_s = s == 1.0;
  std::uint64_t mode = static_cast<std::uint64_t>(mean);  // floor; mean > 1e4 here
  kahan_sum s0;
  kahan_sum s1;
  std::uint64_t terms = 0;
  bool edge = false;

  // Fixed k^s within short blocks: the block width grows as 2e-12 * k, so the
  // frozen power is accurate to ~2e-12 relative while pow() amortizes away.
  double cur_pow = 0.0;
  std::uint64_t pow_next = 0;
  auto powk = [&](std::uint64_t k) {
    if (exact_s) return static_cast<double>(k);
    if (k >= pow_next) {
      cur_pow = std::pow(static_cast<double>(k), s);
      const std::uint64_t blk = static_cast<std::uint64_t>(2e-12 * static_cast<double>(k));
      pow_next = k + (blk > 0 ? blk : 1);
    }
    return cur_pow;
  };

  {  // the mode itself
    s0.add(1.0);
    s1.add(powk(mode));
    ++terms;
  }
  {  // upward pass
    double u = 1.0;
    std::uint64_t k = mode;
    pow_next = 0;
    while (true) {
      if (static_cast<double>(k) >= m) {  // upper support edge (m may exceed 2^64)
        edge = true;
        break;
      }
      const double r = c * (m - static_cast<double>(k)) / (static_cast<double>(k) + 1.0);
      u *= r;
      ++k;
      s0.add(u);
      s1.add(u * powk(k));
      ++terms;
      // Past the mode the ratio only shrinks, so the remaining tail is below
      // the geometric sum u*r/(1-r) for any r < 1; no closeness guard needed
      // (requiring r << 1 would walk ~sigma^2 terms instead of ~sigma).
      if (r < 1.0 && u * r < (1.0 - r) * tail_tol * s0.sum / 4.0) break;
    }
  }
  {  // downward pass
    double u = 1.0;
    std::uint64_t k = mode;
    pow_next = 0;
    while (true) {
      if (k == 0) {
        edge = true;
        break;
      }
      const double r = static_cast<double>(k) / (c * (m - static_cast<double>(k) + 1.0));
      u *= r;
      --k;
      s0.add(u);
      if (k > 0) s1.add(u * powk(k));
      ++terms;
      if (r < 1.0 && u * r < (1.0 - r) * tail_tol * s0.sum / 4.0) break;
    }
  }
  return {std::log(s1.sum) - std::log(s0.sum), edge, terms};
}

struct moment_report {
  int n = 0;
  double rate = 0.0;
  double s = 0.0;
  double delta_requested = 0.0;
  double delta = 0.0;          // snapped to the integer lattice d/n
  int d = 0;
  bool in_concentration = false;
  double predicted = 0.0;      // nats per channel use
  double oracle = 0.0;         // nats per channel use
  double abs_error = 0.0;
  bool truncated_at_edge = false;
};

inline double population(int n, double rate) {
  const double m = std::round(std::exp(n * rate));
  if (!std::isfinite(m)) throw overflow_error("population e^{nR} overflows a double");
  return m;
}

// (1/n) ln E{N^s(n*delta)} with delta snapped to the nearest d/n.
inline double exact_moment_exponent(int n, double rate, double s, double delta,
                                    double tail_tol = 1e-15) {
  if (n < 1 || n > 4096) throw domain_error("exact_moment_exponent: n must lie in [1, 4096]");
  if (!(rate >= 0.0 && rate <= kLn2)) {
    throw rate_out_of_range("exact_moment_exponent: rate must lie in [0, ln 2]");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw domain_error("exact_moment_exponent: delta must lie in [0,1]");
  }
  const int d = static_cast<int>(std::lround(delta * n));
  const double m = population(n, rate);
  const auto res = binomial_fractional_moment(m, log_qdelta(n, d), s, tail_tol);
  return res.log_moment / n;
}

// Full comparison row: oracle vs the asymptotic prediction at the snapped delta.
inline moment_report verify_moment(int n, double rate, double s, double delta,
                                   double tail_tol = 1e-15) {
  if (n < 1 || n > 4096) throw domain_error("verify_moment: n must lie in [1, 4096]");
  if (!(rate >= 0.0 && rate <= kLn2)) {
    throw rate_out_of_range("verify_moment: rate must lie in [0, ln 2]");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) throw domain_error("verify_moment: delta must lie in [0,1]");
  moment_report rep;
  rep.n = n;
  rep.rate = rate;
  rep.s = s;
  rep.delta_requested = delta;
  rep.d = static_cast<int>(std::lround(delta * n));
  rep.delta = static_cast<double>(rep.d) / n;
  rep.in_concentration = in_g_r(rate, rep.delta);
  rep.predicted = predicted_moment_exponent(rate, s, rep.delta);
  const double m = population(n, rate);
  const auto res = binomial_fractional_moment(m, log_qdelta(n, rep.d), s, tail_tol);
  rep.oracle = res.log_moment / n;
  rep.truncated_at_edge = res.truncated_at_edge;
  rep.abs_error = std::fabs(rep.oracle - rep.predicted);
  return rep;
}

// D(a||b) for Bernoulli parameters, both strictly inside (0,1).
inline double binary_divergence(double a, double b) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw domain_error("binary_divergence: arguments must lie in (0,1)");
  }
  return a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
}

// The elementary bound D(a||b) >= a(ln(a/b) - 1) used in the tail estimates.
inline double divergence_lower_bound(double a, double b) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw domain_error("divergence_lower_bound: arguments must lie in (0,1)");
  }
  return a * (std::log(a / b) - 1.0);
}

struct tail_bound {
  double log_bound = 0.0;  // ln Pr{N >= e^{nA}} <= log_bound
  bool vacuous = false;    // bracket <= 0: only the trivial bound ln 1 = 0 holds
};

// Chernoff bound on the enumerator upper tail:
//   ln Pr{N >= e^{nA}} <= -e^{nA} (n [ln 2 - R - h(delta) + A] - 1).
inline tail_bound chernoff_tail_bound(int n, double rate, double a, double delta) {
  if (n < 1) throw domain_error("chernoff_tail_bound: n must be positive");
  if (!(a >= 0.0 && a < rate)) throw domain_error("chernoff_tail_bound: need A in [0, R)");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw domain_error("chernoff_tail_bound: delta must lie in [0,1]");
  }
  const double bracket = n * (kLn2 - rate - binary_entropy(delta) + a) - 1.0;
  if (bracket <= 0.0) return {0.0, true};
  return {-std::exp(n * a) * bracket, false};
}

}  // namespace erexp::moments
