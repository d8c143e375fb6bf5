#pragma once

// Counter-based random numbers (Philox4x32-10). A generator is keyed by the
// base seed; its counter encodes (run index, stream role, draw number), so any
// run's streams can be reproduced without touching other runs.

#include <array>
#include <cstdint>
#include <limits>

namespace ccd {

/// Separates independent streams belonging to the same run.
enum class StreamRole : std::uint32_t {
  observations = 0,
  tau = 1,
  chernoff = 2,
};

/// Raw Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class CounterRng {
 public:
  using result_type = std::uint64_t;

  /// run_index must be below 2^56.
  CounterRng(std::uint64_t base_seed, std::uint64_t run_index, StreamRole role) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept;
  /// Bernoulli draw returned as 0.0 / 1.0.
  double bernoulli(double theta) noexcept;
  /// N(0,1) by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t run_lo_;
  std::uint32_t run_hi_role_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words left in buffer_
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ccd
