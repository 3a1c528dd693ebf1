// Copyright 2026 The featpl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEATPL_RNG_H_
#define FEATPL_RNG_H_

#include <cstdint>
#include <random>

namespace featpl {

// Seeded generator with explicit variate construction, so streams are
// reproducible across compilers and standard libraries (std distributions
// are implementation-defined). Samplers take Rng& by reference; parallel
// callers derive independent streams with ForStream().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(Mix(seed)) {}

  std::uint64_t NextU64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n); n >= 1. Rejection-free modulo bias is
  // negligible for the n used here (n << 2^32), but reject anyway.
  std::uint64_t UniformInt(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = NextU64();
    } while (x >= limit);
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Independent stream derived from (seed, stream); stream 0..k-1 for k
  // parallel trials reproduces the same draws regardless of scheduling.
  static Rng ForStream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(Mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

 private:
  // splitmix64 finalizer; decorrelates small consecutive seeds.
  static std::uint64_t Mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace featpl

#endif  // FEATPL_RNG_H_
