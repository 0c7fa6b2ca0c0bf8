#pragma once

#include <cmath>

namespace perfcity::harness {

namespace detail {
template <typename Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) * 0x1.0p-53;
}
}  // namespace detail

template <typename Engine>
std::uint64_t poisson_draw(Engine& rng, double mean) {
  constexpr double kPiece = 30.0;
  std::uint64_t total = 0;
  while (mean > 0) {
    const double m = mean > kPiece ? kPiece : mean;
    mean -= m;
    const double limit = std::exp(-m);
    double p = detail::uniform01(rng);
    std::uint64_t k = 0;
    while (p > limit) {
      ++k;
      p *= detail::uniform01(rng);
    }
    total += k;
  }
  return total;
}

}  // namespace perfcity::harness
