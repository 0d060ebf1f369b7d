#include <cmath>
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"
#include "erexp/rng.hpp"
#include "erexp/simulator.hpp"
#include "helpers.hpp"

namespace sim = erexp::sim;
using erexp::make_bsc;

namespace {

sim::codebook manual_codebook(int n, std::vector<std::uint8_t> words) {
  sim::codebook cb;
  cb.n = n;
  cb.m = words.size() / n;
  cb.words = std::move(words);
  return cb;
}

}  // namespace

TEST_CASE("codebook sampling is deterministic in the seed", "[simulator]") {
  const auto ens = make_bsc(0.1);
  const auto a = sim::sample_codebook(ens, 16, 0.3, 7);
  const auto b = sim::sample_codebook(ens, 16, 0.3, 7);
  REQUIRE(a.m == b.m);
  CHECK(a.words == b.words);
  const auto c = sim::sample_codebook(ens, 16, 0.3, 8);
  CHECK(a.words != c.words);
  CHECK(a.m == 122);  // round(e^{16*0.3})
}

TEST_CASE("codebook letters follow the input law", "[simulator]") {
  const auto ens = testing_support::ternary_example();
  const auto cb = sim::sample_codebook(ens, 24, 0.3, 11);
  REQUIRE(cb.m == 1339);
  const double total = static_cast<double>(cb.words.size());
  std::vector<double> freq(3, 0.0);
  for (std::uint8_t w : cb.words) freq[w] += 1.0;
  for (std::size_t x = 0; x < 3; ++x) {
    const double p = ens.input(x);
    const double sigma = std::sqrt(total * p * (1.0 - p));
    CHECK(std::fabs(freq[x] - total * p) <= 3.0 * sigma);
  }
}

TEST_CASE("codebook sampling guards", "[simulator]") {
  const auto ens = make_bsc(0.1);
  // round(e^{nR}) < 2 is not a codebook.
  CHECK_THROWS_AS(sim::sample_codebook(ens, 4, 0.0, 1), erexp::domain_error);
  // Populations beyond 9e15 or beyond the letter budget are refused.
  CHECK_THROWS_AS(sim::sample_codebook(ens, 1, 40.0, 1), erexp::budget_exceeded);
  CHECK_THROWS_AS(sim::sample_codebook(ens, 16, 0.5, 1, 100), erexp::budget_exceeded);
  CHECK_THROWS_AS(sim::sample_codebook(ens, 0, 0.5, 1), erexp::domain_error);
}

TEST_CASE("exact score ties erase", "[simulator]") {
  const auto ens = make_bsc(0.1);
  const auto cb = manual_codebook(2, {0, 0, 0, 0});  // two identical words
  CHECK_FALSE(sim::decode(ens, cb, {0, 1}, 0.1).has_value());
  CHECK_FALSE(sim::decode(ens, cb, {0, 1}, 0.0).has_value());
}

TEST_CASE("well separated words decode to the nearest", "[simulator]") {
  const auto ens = make_bsc(0.01);
  const int n = 16;
  std::vector<std::uint8_t> words;
  auto append = [&](std::uint8_t a, std::uint8_t b) {
    for (int i = 0; i < 8; ++i) words.push_back(a);
    for (int i = 0; i < 8; ++i) words.push_back(b);
  };
  append(0, 0);
  append(1, 1);
  append(0, 1);
  append(1, 0);
  const auto cb = manual_codebook(n, std::move(words));
  const std::vector<std::uint8_t> y(cb.word(2), cb.word(2) + n);
  const auto hit = sim::decode(ens, cb, y, 0.1);
  REQUIRE(hit.has_value());
  CHECK(*hit == 2);
  CHECK(sim::decode(ens, cb, y, 0.0).value() == 2);
}

TEST_CASE("thresholds above the per-letter range always erase", "[simulator]") {
  // best - lse <= n * ln((1-p)/p), so T beyond that log-ratio rejects all y.
  const auto ens = make_bsc(0.1);
  const auto cb = sim::sample_codebook(ens, 12, 0.3, 5);
  erexp::rng::splitmix64 g(123);
  std::vector<std::uint8_t> y(12);
  for (int rep = 0; rep < 20; ++rep) {
    for (auto& v : y) v = static_cast<std::uint8_t>(g.next() & 1);
    CHECK_FALSE(sim::decode(ens, cb, y, 2.3).has_value());
  }
}

TEST_CASE("decode argument guards", "[simulator]") {
  const auto ens = make_bsc(0.1);
  const auto cb = manual_codebook(2, {0, 0, 1, 1});
  CHECK_THROWS_AS(sim::decode(ens, cb, {0, 1, 0}, 0.1), erexp::domain_error);
  CHECK_THROWS_AS(sim::decode(ens, cb, {0, 1}, -0.1), erexp::invalid_threshold);
}

TEST_CASE("wilson interval fixed points", "[simulator]") {
  const double z2 = 1.959963984540054 * 1.959963984540054;
  const auto zero = sim::wilson(0, 100);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == Catch::Approx(z2 / (100.0 + z2)).margin(1e-12));
  const auto half = sim::wilson(50, 100);
  CHECK(half.estimate == Catch::Approx(0.5).margin(1e-15));
  CHECK(half.lo == Catch::Approx(0.403831).margin(1e-4));
  CHECK(half.hi == Catch::Approx(0.596169).margin(1e-4));
  CHECK(0.5 * (half.lo + half.hi) == Catch::Approx(0.5).margin(1e-12));
  const auto full = sim::wilson(100, 100);
  CHECK(full.hi == 1.0);
  CHECK(full.lo == Catch::Approx(0.963).margin(1e-3));
}

TEST_CASE("empirical exponent and its zero-count fallback", "[simulator]") {
  const auto hit = sim::empirical_exponent(13, 10000, 25);
  CHECK_FALSE(hit.is_lower_bound);
  CHECK(hit.value == Catch::Approx(-std::log(13.0 / 10000.0) / 25.0).margin(1e-12));
  const auto none = sim::empirical_exponent(0, 10000, 50);
  CHECK(none.is_lower_bound);
  CHECK(none.value == Catch::Approx(std::log(10000.0) / 50.0).margin(1e-12));
}

TEST_CASE("run argument guards", "[simulator]") {
  const auto ens = make_bsc(0.1);
  CHECK_THROWS_AS(sim::run(ens, 16, 0.3, 0.05, 0, 1), erexp::domain_error);
  CHECK_THROWS_AS(sim::run(ens, 16, 0.3, -0.05, 100, 1), erexp::invalid_threshold);
  CHECK_THROWS_AS(sim::run(ens, 16, 0.3, 0.05, 100, 1, 0), erexp::domain_error);
  CHECK_THROWS_AS(sim::run(ens, 16, 0.3, 0.05, 100, 1, 2, 50), erexp::budget_exceeded);
}

TEST_CASE("run counts are consistent and reproducible", "[simulator]") {
  const auto ens = make_bsc(0.1);
  const auto a = sim::run(ens, 32, 0.15, 0.05, 4096, 3, 4);
  CHECK(a.trials == 4096);
  CHECK(a.count_e1 == a.count_e2 + a.count_erase);
  CHECK(a.count_e1 <= a.trials);
  CHECK(a.p_e2.estimate <= a.p_e1.estimate);
  for (const auto* iv : {&a.p_e1, &a.p_e2, &a.p_r0}) {
    CHECK(iv->lo <= iv->estimate);
    CHECK(iv->estimate <= iv->hi);
  }
  const auto b = sim::run(ens, 32, 0.15, 0.05, 4096, 3, 4);
  CHECK(a.count_e2 == b.count_e2);
  CHECK(a.count_erase == b.count_erase);
}

TEST_CASE("raising the threshold trades errors for erasures", "[simulator]") {
  // Reruns at a new threshold see identical codebooks and noise, so the
  // comparison is per-trial, not just in distribution.
  const auto ens = make_bsc(0.1);
  std::uint64_t prev_erase = 0;
  std::uint64_t prev_e2 = UINT64_MAX;
  for (double t : {0.0, 0.05, 0.12}) {
    const auto res = sim::run(ens, 32, 0.15, t, 4096, 9, 4);
    CHECK(res.count_erase >= prev_erase);
    CHECK(res.count_e2 <= prev_e2);
    prev_erase = res.count_erase;
    prev_e2 = res.count_e2;
  }
}

TEST_CASE("noiseless channel never errs", "[simulator]") {
  const auto ens = make_bsc(1e-12);
  const auto res = sim::run(ens, 24, 0.2, 0.05, 4096, 17, 2);
  CHECK(res.count_e1 == 0);
  CHECK(res.exp_e1.is_lower_bound);
  CHECK(res.exp_e1.value == Catch::Approx(std::log(4096.0) / 24.0).margin(1e-12));
}
