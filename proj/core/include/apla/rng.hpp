#pragma once

#include <cstdint>
#include <limits>

namespace apla {

/// Counter-based 64-bit generator: the n-th output is a SplitMix64 finalizer
/// applied to (key + n * golden gamma). Streams keyed by (seed, stream index)
/// are independent of the order in which they are consumed, which keeps
/// parallel replicates reproducible.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace apla
