#include "ccd/rng.hpp"

#include <cmath>
#include <numbers>

namespace ccd {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53U;
constexpr std::uint32_t kM1 = 0xCD9E8D57U;
constexpr std::uint32_t kW0 = 0x9E3779B9U;
constexpr std::uint32_t kW1 = 0xBB67AE85U;

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t base_seed, std::uint64_t run_index, StreamRole role) noexcept
    : key_{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32)},
      run_lo_(static_cast<std::uint32_t>(run_index)),
      run_hi_role_(static_cast<std::uint32_t>((run_index >> 32) & 0x00FFFFFFU) |
                   (static_cast<std::uint32_t>(role) << 24)) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  if (buffered_ == 0) {
    buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                             run_lo_, run_hi_role_},
                            key_);
    ++block_;
    buffered_ = 2;
  }
  const int i = 2 - buffered_;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[2 * i + 1]) << 32) | buffer_[2 * i];
}

double CounterRng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::bernoulli(double theta) noexcept { return uniform() < theta ? 1.0 : 0.0; }

double CounterRng::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0,1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

}  // namespace ccd
