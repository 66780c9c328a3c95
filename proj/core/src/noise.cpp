#include "gsc/noise.hpp"

#include <cmath>
#include <numbers>

namespace gsc {

namespace {

// splitmix64 finalizer
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                           std::uint64_t lane) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ path);
  h = mix(h ^ step);
  h = mix(h ^ lane);
  return h;
}

}  // namespace

double NoiseStream::uniform(std::uint64_t step, std::uint32_t lane) const {
  const std::uint64_t w = keyed(seed_, path_, step, lane);
  // top 53 bits, shifted into (0, 1]
  return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
}

double NoiseStream::gaussian(std::uint64_t step, double dt) const {
  const double u1 = uniform(step, 0);
  const double u2 = uniform(step, 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return std::sqrt(dt) * r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gsc
