#pragma once

#include <cstdint>

#include "lpl/common.hpp"

namespace lpl {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based uniform/Gaussian stream. Every variate is a pure function
/// of (seed, counter), so chains are bit-reproducible regardless of thread
/// count or evaluation order. Gaussians use the Box-Muller cosine branch on
/// two SplitMix64-hashed uniforms per variate.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : base_(mix64(seed ^ 0x5851f42d4c957f2dULL)) {}

  /// Uniform in (0, 1], from counter c.
  double uniform(std::uint64_t c) const {
    return static_cast<double>((raw(c) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal indexed by a flat counter.
  double normal(std::uint64_t idx) const;

  /// Z vector for chain step `step` (0-based), dimension d:
  /// coordinate i uses counter step*d + i.
  Vector normal_vector(std::uint64_t step, int d) const;

  /// Unit vector drawn by normalizing a d-dim normal (for sliced metrics).
  Vector unit_vector(std::uint64_t step, int d) const;

 private:
  std::uint64_t raw(std::uint64_t c) const { return mix64(base_ + c * 0x9e3779b97f4a7c15ULL); }
  std::uint64_t base_;
};

}  // namespace lpl
