#pragma once

#include <cstdint>
#include <limits>

namespace fdnet {

/// Counter-based random stream. The k-th output is a pure function of
/// (master_seed, trial_index, purpose, k), so every trial can be replayed in
/// isolation and trials may be evaluated on any thread in any order.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t master_seed, std::uint64_t trial_index, std::uint64_t purpose = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }

  /// Output at an absolute draw index; does not advance the stream.
  result_type at(std::uint64_t draw_index) const;

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Exponential with mean 1, strictly positive.
  double exponential();

  /// Skips n draws.
  void discard(std::uint64_t n) noexcept { counter_ += n; }

  std::uint64_t draws_used() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace fdnet
