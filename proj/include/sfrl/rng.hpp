#pragma once

// Counter-based deterministic random numbers. Every value is a pure function
// of (seed, stream, counter), so an encoder and a decoder holding the same
// seed regenerate identical randomness without communicating.

#include <cstddef>
#include <cstdint>

namespace sfrl {

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a substream id for a named role (e.g. one codebook per candidate).
std::uint64_t derive_stream(std::uint64_t domain, std::uint64_t index);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Uniform on (0, 1).
  double uniform_open(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  std::uint64_t next_bits() { return rng_.bits(counter_++); }
  double next_uniform() { return rng_.uniform(counter_++); }
  /// Exp(1) by inversion: -ln U with U uniform on (0, 1).
  double next_exponential();
  /// Index drawn from a pmf by inversion of its cumulative sums.
  std::size_t next_categorical(const double* probs, std::size_t n);
  std::uint64_t counter() const { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace sfrl
