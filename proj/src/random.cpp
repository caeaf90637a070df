// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/random.hpp"

#include <cmath>

namespace sdese {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

const double kHalfSqrt = std::sqrt(0.5);

}  // namespace

cplx RandomSource::complex_normal() {
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalfSqrt * re, kHalfSqrt * im};
}

void RandomSource::fill_complex_normal(ComplexGrid& grid) {
  for (cplx& v : grid.values()) v = complex_normal();
}

ComplexGrid RandomSource::complex_normal_like(const ComplexGrid& shape) {
  ComplexGrid z(shape.rows(), shape.cols());
  fill_complex_normal(z);
  return z;
}

std::uint64_t RandomSource::derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

}  // namespace sdese
