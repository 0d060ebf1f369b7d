#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"
#include "erexp/rng.hpp"

// Monte Carlo estimates of the erasure / undetected-error probabilities of the
// threshold decoder on random codes: accept message m iff
//   ln P(y|x_m) - ln sum_{m' != m} P(y|x_{m'}) >= n T,
// otherwise erase.  E2 = accepted but wrong, R0 = erased, E1 = E2 or R0.

namespace erexp::sim {

constexpr std::uint64_t kDefaultLetterBudget = 100000000;  // n*M per codebook

struct codebook {
  int n = 0;
  std::uint64_t m = 0;                // number of codewords
  std::vector<std::uint8_t> words;    // m*n letters, row-major
  std::uint64_t seed = 0;

  const std::uint8_t* word(std::uint64_t idx) const { return words.data() + idx * n; }
};

namespace detail {

constexpr std::uint64_t kCodebookDomain = 0x636f6465626f6f6bull;  // "codebook"
constexpr std::uint64_t kTrialDomain = 0x747269616c737472ull;     // "trialstr"

inline std::uint64_t codeword_count(int n, double rate) {
  const double m = std::round(std::exp(n * rate));
  if (!(m >= 2.0)) throw domain_error("codebook needs at least 2 codewords (round(e^{nR}) < 2)");
  if (m > 9e15) throw budget_exceeded("codebook population round(e^{nR}) is out of reach");
  return static_cast<std::uint64_t>(m);
}

// Inverse-CDF draw from a small distribution; the fallthrough returns the last
// positive-probability letter so u ~ 1 rounding can never escape the support.
inline std::uint8_t draw_letter(const std::vector<double>& cdf, double u) {
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
    if (u < cdf[i]) return static_cast<std::uint8_t>(i);
  }
  return static_cast<std::uint8_t>(cdf.size() - 1);
}

inline std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace detail

// Deterministic i.i.d. codebook: letters drawn from the input distribution by
// one stream keyed off (seed, codebook domain).
inline codebook sample_codebook(const ensemble& ens, int n, double rate, std::uint64_t seed,
                                std::uint64_t letter_budget = kDefaultLetterBudget) {
  if (n < 1) throw domain_error("sample_codebook: n must be positive");
  codebook cb;
  cb.n = n;
  cb.m = detail::codeword_count(n, rate);
  cb.seed = seed;
  const std::uint64_t letters = cb.m * static_cast<std::uint64_t>(n);
  if (letters > letter_budget) {
    throw budget_exceeded("codebook of " + std::to_string(letters) +
                          " letters exceeds the budget of " + std::to_string(letter_budget));
  }
  std::vector<double> px(ens.nx());
  for (std::size_t x = 0; x < ens.nx(); ++x) px[x] = ens.input(x);
  const std::vector<double> cdf = detail::cumulative(px);
  rng::splitmix64 g = rng::derive_stream(seed, detail::kCodebookDomain, 0);
  cb.words.resize(letters);
  for (std::uint64_t i = 0; i < letters; ++i) {
    cb.words[i] = detail::draw_letter(cdf, g.next_unit());
  }
  return cb;
}

// Threshold decode; nullopt means erase.  scores is caller-provided scratch so
// the hot path never allocates.
inline std::optional<std::uint64_t> decode_scored(const ensemble& ens, const codebook& cb,
                                                  const std::uint8_t* y, double threshold,
                                                  std::vector<double>& scores) {
  if (threshold < 0.0) throw invalid_threshold("decode: threshold must be nonnegative");
  const std::size_t ny = ens.ny();
  const int n = cb.n;
  scores.resize(cb.m);

  // Flat log-likelihood table: scores are sums of log channel entries.
  double table[64];
  const bool small = ens.nx() * ny <= 64;
  std::vector<double> big_table;
  const double* tab;
  if (small) {
    for (std::size_t x = 0; x < ens.nx(); ++x)
      for (std::size_t yy = 0; yy < ny; ++yy) table[x * ny + yy] = ens.log_channel(x, yy);
    tab = table;
  } else {
    big_table.resize(ens.nx() * ny);
    for (std::size_t x = 0; x < ens.nx(); ++x)
      for (std::size_t yy = 0; yy < ny; ++yy) big_table[x * ny + yy] = ens.log_channel(x, yy);
    tab = big_table.data();
  }

  const double ninf = -std::numeric_limits<double>::infinity();
  double best = ninf;
  double second = ninf;
  std::uint64_t best_idx = 0;
  for (std::uint64_t m = 0; m < cb.m; ++m) {
    const std::uint8_t* w = cb.word(m);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += tab[w[i] * ny + y[i]];
    scores[m] = acc;
    if (acc > best) {
      second = best;
      best = acc;
      best_idx = m;
    } else if (acc > second) {
      second = acc;
    }
  }
  if (best == ninf) return std::nullopt;       // y impossible under every word
  if (best == second) return std::nullopt;     // exact tie: degenerate, erase
  double lse;
  if (second == ninf) {
    lse = ninf;  // all competitors impossible: infinite margin
  } else {
    double acc = 0.0;
    for (std::uint64_t m = 0; m < cb.m; ++m) {
      if (m == best_idx) continue;
      acc += std::exp(scores[m] - second);
    }
    lse = second + std::log(acc);
  }
  if (best - lse >= n * threshold) return best_idx;
  return std::nullopt;
}

inline std::optional<std::uint64_t> decode(const ensemble& ens, const codebook& cb,
                                           const std::vector<std::uint8_t>& y, double threshold) {
  if (static_cast<int>(y.size()) != cb.n) throw domain_error("decode: word length mismatch");
  std::vector<double> scores;
  return decode_scored(ens, cb, y.data(), threshold, scores);
}

struct interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct exponent_estimate {
  double value = 0.0;
  bool is_lower_bound = false;  // true when the event count was zero
};

struct sim_result {
  std::uint64_t trials = 0;
  std::uint64_t count_e1 = 0;
  std::uint64_t count_e2 = 0;
  std::uint64_t count_erase = 0;
  interval p_e1, p_e2, p_r0;
  exponent_estimate exp_e1, exp_e2, exp_r0;
};

// 95% Wilson score interval; behaves sensibly for tiny counts where the Wald
// interval collapses.
inline interval wilson(std::uint64_t count, std::uint64_t trials) {
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(trials);
  const double x = static_cast<double>(count);
  interval iv;
  iv.estimate = x / nn;
  const double z2 = z * z;
  const double denom = nn + z2;
  const double center = (x + z2 / 2.0) / denom;
  const double half = z * std::sqrt(x * (nn - x) / nn + z2 / 4.0) / denom;
  iv.lo = center - half > 0.0 ? center - half : 0.0;
  iv.hi = center + half < 1.0 ? center + half : 1.0;
  return iv;
}

inline exponent_estimate empirical_exponent(std::uint64_t count, std::uint64_t trials, int n) {
  if (count == 0) return {std::log(static_cast<double>(trials)) / n, true};
  return {-std::log(static_cast<double>(count) / static_cast<double>(trials)) / n, false};
}

constexpr std::uint64_t kChunkTrials = 4096;

// Ensemble-averaged Monte Carlo run.  Trials are split into fixed 4096-trial
// chunks; chunk c draws from a stream keyed by (seed, c) and uses codebook
// c mod codebooks_per_run, so the result is independent of thread scheduling.
// A trial consumes the same number of draws whatever the outcome, so reruns
// with a different threshold see identical noise.
inline sim_result run(const ensemble& ens, int n, double rate, double threshold,
                      std::uint64_t trials, std::uint64_t seed,
                      unsigned codebooks_per_run = 32,
                      std::uint64_t letter_budget = kDefaultLetterBudget) {
  if (trials < 1) throw domain_error("run: need at least one trial");
  if (threshold < 0.0) throw invalid_threshold("run: threshold must be nonnegative");
  if (codebooks_per_run < 1) throw domain_error("run: need at least one codebook");

  std::vector<codebook> books;
  books.reserve(codebooks_per_run);
  for (unsigned k = 0; k < codebooks_per_run; ++k) {
    books.push_back(sample_codebook(ens, n, rate,
                                    rng::derive_stream(seed, detail::kCodebookDomain, k).next(),
                                    letter_budget));
  }

  std::vector<std::vector<double>> row_cdf(ens.nx());
  for (std::size_t x = 0; x < ens.nx(); ++x) {
    std::vector<double> row(ens.ny());
    for (std::size_t y = 0; y < ens.ny(); ++y) row[y] = ens.channel(x, y);
    row_cdf[x] = detail::cumulative(row);
  }

  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  struct counts {
    std::uint64_t e2 = 0;
    std::uint64_t erase = 0;
  };

  auto run_chunk = [&](std::uint64_t c, std::vector<double>& scores,
                       std::vector<std::uint8_t>& y) {
    counts out;
    const codebook& cb = books[c % codebooks_per_run];
    rng::splitmix64 g = rng::derive_stream(seed, detail::kTrialDomain, c);
    const std::uint64_t first = c * kChunkTrials;
    const std::uint64_t last = std::min(trials, first + kChunkTrials);
    for (std::uint64_t t = first; t < last; ++t) {
      const std::uint64_t m_true = g.next() % cb.m;
      const std::uint8_t* w = cb.word(m_true);
      for (int i = 0; i < n; ++i) y[i] = detail::draw_letter(row_cdf[w[i]], g.next_unit());
      const auto decision = decode_scored(ens, cb, y.data(), threshold, scores);
      if (!decision.has_value()) {
        ++out.erase;
      } else if (*decision != m_true) {
        ++out.e2;
      }
    }
    return out;
  };

  counts total;
  unsigned workers = std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  if (workers > chunks) workers = static_cast<unsigned>(chunks);
  if (workers <= 1) {
    std::vector<double> scores;
    std::vector<std::uint8_t> y(n);
    for (std::uint64_t c = 0; c < chunks; ++c) {
      const counts out = run_chunk(c, scores, y);
      total.e2 += out.e2;
      total.erase += out.erase;
    }
  } else {
    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> e2{0};
    std::atomic<std::uint64_t> erase{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned wi = 0; wi < workers; ++wi) {
      pool.emplace_back([&] {
        std::vector<double> scores;
        std::vector<std::uint8_t> y(n);
        std::uint64_t local_e2 = 0;
        std::uint64_t local_erase = 0;
        while (true) {
          const std::uint64_t c = next_chunk.fetch_add(1);
          if (c >= chunks) break;
          const counts out = run_chunk(c, scores, y);
          local_e2 += out.e2;
          local_erase += out.erase;
        }
        e2 += local_e2;
        erase += local_erase;
      });
    }
    for (auto& th : pool) th.join();
    total.e2 = e2.load();
    total.erase = erase.load();
  }

  sim_result res;
  res.trials = trials;
  res.count_e2 = total.e2;
  res.count_erase = total.erase;
  res.count_e1 = total.e2 + total.erase;
  res.p_e1 = wilson(res.count_e1, trials);
  res.p_e2 = wilson(res.count_e2, trials);
  res.p_r0 = wilson(res.count_erase, trials);
  res.exp_e1 = empirical_exponent(res.count_e1, trials, n);
  res.exp_e2 = empirical_exponent(res.count_e2, trials, n);
  res.exp_r0 = empirical_exponent(res.count_erase, trials, n);
  return res;
}

}  // namespace erexp::sim
