// Copyright 2026 The Milq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MILQ_RNG_HPP_
#define MILQ_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace milq {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over bytes; used to fold string tags into seed derivations.
std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic seed derivation: folds a sequence of words into a base seed.
// Every stochastic component receives its own derived seed so that results
// are independent of evaluation order and thread scheduling.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> words);

// Deterministic random source. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); all distributions are implemented
// here rather than with std::*_distribution, whose algorithms are
// implementation-defined, so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound), unbiased via mask rejection. bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller; the paired deviate is cached.
  double normal();

  // Uniform k-subset of {0, ..., population-1} (Floyd's algorithm),
  // returned sorted ascending. Requires 0 <= k <= population.
  std::vector<std::int64_t> sample_without_replacement(std::int64_t population,
                                                       std::int64_t k);

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace milq

#endif  // MILQ_RNG_HPP_
