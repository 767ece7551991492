// Copyright 2026 The mtreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTREG_RNG_HPP
#define MTREG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace mtreg {

/// Seeded random source with explicit variate transforms.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// distribution adaptors are not, so uniform/normal/shuffle are spelled out
/// here to keep generated datasets stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the trigonometric Box-Muller transform.
  /// Draws come in pairs; the spare is cached in the generator state.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1]
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Unbiased integer in [0, bound) by rejection; bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t x;
    do {
      x = gen_();
    } while (x < threshold);
    return x % bound;
  }

  /// Fisher-Yates shuffle driven by below(); deterministic per seed.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Cheap stateless mix for deriving per-cell seeds from a base seed and grid
/// coordinates (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (a + 1) +
                    0xBF58476D1CE4E5B9ULL * (b + 1);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace mtreg

#endif  // MTREG_RNG_HPP
