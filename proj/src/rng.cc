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

#include "robustdist/rng.h"

#include <algorithm>
#include <cmath>

#include "robustdist/core.h"

namespace robustdist {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::below: bound must be >= 1");
  // Reject the partial block at the top of the 64-bit range.
  const std::uint64_t limit = -bound % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x < limit);
  return x % bound;
}

CategoricalSampler::CategoricalSampler(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("CategoricalSampler: no weights");
  cdf_.resize(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw InvalidArgument("CategoricalSampler: negative weight");
    }
    total += weights[i];
    cdf_[i] = total;
  }
  if (!(total > 0.0)) throw InvalidArgument("CategoricalSampler: zero total");
  for (double& c : cdf_) c /= total;
  // Zero-weight tail entries must never be drawn.
  std::size_t last = cdf_.size() - 1;
  while (last > 0 && weights[last] == 0.0) --last;
  for (std::size_t i = last; i < cdf_.size(); ++i) cdf_[i] = 1.0;
}

int CategoricalSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(it - cdf_.begin());
}

}  // namespace robustdist
