// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <random>

#include "sdese/complex_grid.hpp"

namespace sdese {

/// Seeded pseudo-random source. Not thread-safe; give each thread its own
/// instance, typically via split().
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  std::uint64_t next_u64() { return engine_(); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Circularly-symmetric complex normal: Re and Im each N(0, 1/2), E|z|^2 = 1.
  cplx complex_normal();
  void fill_complex_normal(ComplexGrid& grid);
  ComplexGrid complex_normal_like(const ComplexGrid& shape);

  // Stream splitting rule: child stream i is seeded with
  // splitmix64(seed + 0x9E3779B97F4A7C15 * (i + 1)).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
  static RandomSource split(std::uint64_t seed, std::uint64_t stream) {
    return RandomSource(derive_seed(seed, stream));
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace sdese
