#pragma once

#include <cstdint>

namespace gsc {

/// Counter-based Gaussian stream: every draw is a pure function of
/// (seed, path_index, step), so paths can be generated in any order on any
/// number of threads and still come out bitwise identical.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t path_index)
      : seed_(seed), path_(path_index) {}

  /// Uniform in (0, 1]; `lane` selects independent substreams per step.
  double uniform(std::uint64_t step, std::uint32_t lane) const;

  /// N(0, dt) increment for the given step (Box-Muller).
  double gaussian(std::uint64_t step, double dt) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_; }

 private:
  std::uint64_t seed_, path_;
};

}  // namespace gsc
