#include "fdnet/random.hpp"

#include <cmath>

namespace fdnet {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t trial_index, std::uint64_t purpose)
    : key_(mix64(mix64(mix64(master_seed) ^ (trial_index + kGolden)) ^ (purpose * kGolden + 1))) {}

CounterRng::result_type CounterRng::at(std::uint64_t draw_index) const {
  return mix64(key_ + (draw_index + 1) * kGolden);
}

double CounterRng::uniform() {
  // 53 random bits centred in their bucket: never exactly 0 or 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential() { return -std::log(uniform()); }

}  // namespace fdnet
