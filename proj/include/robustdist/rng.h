// Copyright 2026 The robustdist Authors.
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

// The single random source used by every stochastic operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard <random> distributions are implementation-defined,
// so all transforms (uniform reals, bounded integers, categorical draws,
// shuffles) are done here to keep runs bit-identical across platforms.

#ifndef ROBUSTDIST_RNG_H_
#define ROBUSTDIST_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace robustdist {

// SplitMix64 finalizer over (seed, stream); used to derive independent
// per-trial and per-purpose seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1}; unbiased. Requires bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler over {0, ..., size - 1}.
class CategoricalSampler {
 public:
  // Weights must be nonnegative with a positive total; they are normalized.
  explicit CategoricalSampler(std::span<const double> weights);

  int operator()(Rng& rng) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace robustdist

#endif  // ROBUSTDIST_RNG_H_
