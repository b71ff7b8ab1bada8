// Copyright 2026 The Dilemma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DILEMMA_RNG_H_
#define DILEMMA_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace dilemma {

// Seeded random source whose output is identical on every platform.
// std::mt19937_64 is fully specified by the standard; the standard
// distributions are not, so bounded draws are done here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform01();

  bool Bernoulli(double p) { return Uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

template <typename... Rest>
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return MixSeed(MixSeed(a, b), static_cast<std::uint64_t>(rest)...);
}

// 64-bit FNV-1a. Stable across runs and platforms.
std::uint64_t StableHash(std::string_view text);

}  // namespace dilemma

#endif  // DILEMMA_RNG_H_
