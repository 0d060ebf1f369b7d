#pragma once

#include <cstdint>

// Counter-friendly splitmix64 streams.  Every consumer derives its own stream
// from (seed, domain, index), so results never depend on how work is split
// across threads or in what order streams are consumed.

namespace erexp::rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class splitmix64 {
 public:
  explicit splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Independent stream for (seed, domain, index); domains keep codebook and
// trial streams from ever colliding.
inline splitmix64 derive_stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  return splitmix64(mix64(seed ^ mix64(domain)) ^ mix64(index + 0x9E3779B97F4A7C15ull));
}

}  // namespace erexp::rng
