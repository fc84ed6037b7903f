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

#include "robustdist/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace robustdist {
namespace {

constexpr double kEntryRounding = 1e-9;
constexpr int kRecurrenceMaxTrials = 100;

void ValidateProbabilityVector(const std::vector<double>& v,
                               const char* what) {
  if (v.empty()) {
    throw InvalidArgument(std::string(what) + ": empty");
  }
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < -kEntryRounding || x > 1.0 + kEntryRounding) {
      throw InvalidArgument(std::string(what) + ": entry " +
                            std::to_string(x) + " outside [0, 1]");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw InvalidArgument(std::string(what) + ": entries sum to " +
                          std::to_string(total));
  }
}

std::vector<double> BinomialByRecurrence(int k, double theta) {
  // Start from the lighter tail so (1 - theta)^k stays representable.
  const bool flip = theta > 0.5;
  const double s = flip ? 1.0 - theta : theta;
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  w[0] = std::pow(1.0 - s, k);
  const double ratio = s / (1.0 - s);
  for (int t = 0; t < k; ++t) {
    w[t + 1] = w[t] * ratio * static_cast<double>(k - t) / (t + 1);
  }
  if (flip) std::reverse(w.begin(), w.end());
  return w;
}

std::vector<double> BinomialByLogSpace(int k, double theta) {
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  const double log_s = std::log(theta);
  const double log_f = std::log1p(-theta);
  const double log_kfact = std::lgamma(k + 1.0);
  for (int t = 0; t <= k; ++t) {
    const double log_c =
        log_kfact - std::lgamma(t + 1.0) - std::lgamma(k - t + 1.0);
    w[t] = std::exp(log_c + t * log_s + (k - t) * log_f);
  }
  return w;
}

}  // namespace

Distribution::Distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  ValidateProbabilityVector(probs_, "Distribution");
}

Distribution Distribution::Uniform(int n) {
  if (n < 1) throw InvalidArgument("Uniform: n must be >= 1");
  return Distribution(std::vector<double>(n, 1.0 / n));
}

Distribution Distribution::PointMass(int n, int element) {
  if (n < 1 || element < 0 || element >= n) {
    throw InvalidArgument("PointMass: element out of range");
  }
  std::vector<double> v(n, 0.0);
  v[element] = 1.0;
  return Distribution(std::move(v));
}

Distribution Distribution::Bernoulli(double mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) {
    throw InvalidArgument("Bernoulli: mean outside [0, 1]");
  }
  return Distribution({1.0 - mean, mean});
}

double Distribution::mass(std::uint64_t mask) const {
  double total = 0.0;
  for (int i = 0; i < n(); ++i) {
    if (mask >> i & 1U) total += probs_[i];
  }
  return total;
}

CountDistribution::CountDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  ValidateProbabilityVector(weights_, "CountDistribution");
}

double CountDistribution::cdf(int t) const {
  if (t < 0) return 0.0;
  const int last = std::min(t, k());
  return std::accumulate(weights_.begin(), weights_.begin() + last + 1, 0.0);
}

std::size_t checked_tensor_size(int n, int k, std::size_t cap) {
  if (n < 1 || k < 1) {
    throw InvalidArgument("tensor dimensions must be positive");
  }
  std::size_t size = 1;
  for (int j = 0; j < k; ++j) {
    if (size > cap / static_cast<std::size_t>(n)) {
      throw InvalidArgument("tensor " + std::to_string(n) + "^" +
                            std::to_string(k) + " exceeds dense cap " +
                            std::to_string(cap));
    }
    size *= static_cast<std::size_t>(n);
  }
  return size;
}

Tensor::Tensor(int n, int k, std::size_t cap)
    : n_(n), k_(k), entries_(checked_tensor_size(n, k, cap), 0.0) {}

Tensor::Tensor(int n, int k, std::vector<double> entries, std::size_t cap)
    : n_(n), k_(k), entries_(std::move(entries)) {
  if (entries_.size() != checked_tensor_size(n, k, cap)) {
    throw InvalidArgument("tensor entry count does not match n^k");
  }
}

std::size_t Tensor::flat_index(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != k_) {
    throw InvalidArgument("tensor index has wrong arity");
  }
  std::size_t flat = 0;
  for (int i : index) {
    if (i < 0 || i >= n_) throw InvalidArgument("tensor index out of range");
    flat = flat * n_ + static_cast<std::size_t>(i);
  }
  return flat;
}

double Tensor::at(std::span<const int> index) const {
  return entries_[flat_index(index)];
}

double Tensor::sum() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0.0);
}

bool Tensor::is_probability(double negative_tol) const {
  for (double x : entries_) {
    if (!(x >= -negative_tol)) return false;
  }
  return std::abs(sum() - 1.0) <= kProbSumTolerance;
}

BatchSet::BatchSet(int n, int k) : n_(n), k_(k) {
  if (n < 1 || k < 1) throw InvalidArgument("BatchSet: n and k must be >= 1");
}

void BatchSet::push_back(std::span<const int> batch) {
  if (static_cast<int>(batch.size()) != k_) {
    throw InvalidArgument("batch has length " + std::to_string(batch.size()) +
                          ", expected " + std::to_string(k_));
  }
  for (int x : batch) {
    if (x < 0 || x >= n_) {
      throw InvalidArgument("batch element " + std::to_string(x) +
                            " outside alphabet");
    }
  }
  samples_.insert(samples_.end(), batch.begin(), batch.end());
}

void BatchSet::append(const BatchSet& other) {
  if (other.n_ != n_ || other.k_ != k_) {
    throw InvalidArgument("cannot append batches with different n or k");
  }
  samples_.insert(samples_.end(), other.samples_.begin(),
                  other.samples_.end());
}

double tv_distance(const Distribution& u, const Distribution& v) {
  if (u.n() != v.n()) throw InvalidArgument("tv_distance: length mismatch");
  double total = 0.0;
  for (int i = 0; i < u.n(); ++i) total += std::abs(u[i] - v[i]);
  return 0.5 * total;
}

double tv_distance(const CountDistribution& u, const CountDistribution& v) {
  if (u.k() != v.k()) throw InvalidArgument("tv_distance: length mismatch");
  double total = 0.0;
  for (int t = 0; t <= u.k(); ++t) total += std::abs(u[t] - v[t]);
  return 0.5 * total;
}

double tv_distance(const Tensor& a, const Tensor& b) {
  if (a.n() != b.n() || a.k() != b.k()) {
    throw InvalidArgument("tv_distance: tensor shape mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return 0.5 * total;
}

Tensor tensor_power(const Distribution& p, int k, std::size_t cap) {
  if (k < 1) throw InvalidArgument("tensor_power: k must be >= 1");
  const int n = p.n();
  checked_tensor_size(n, k, cap);
  // Grow one mode at a time: entries of p^(j+1) are p^j entries times p_i.
  std::vector<double> entries = p.probs();
  for (int j = 1; j < k; ++j) {
    std::vector<double> next(entries.size() * n);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      for (int i = 0; i < n; ++i) next[e * n + i] = entries[e] * p[i];
    }
    entries = std::move(next);
  }
  return Tensor(n, k, std::move(entries), cap);
}

Distribution marginal(const Tensor& a) {
  const std::size_t block = a.size() / a.n();
  std::vector<double> m(a.n(), 0.0);
  for (int i = 0; i < a.n(); ++i) {
    const auto begin = a.entries().begin() + i * block;
    m[i] = std::accumulate(begin, begin + block, 0.0);
  }
  return Distribution(std::move(m));
}

Slice slice(const Tensor& a, int i) {
  if (a.k() < 2) throw InvalidArgument("slice: requires k >= 2");
  if (i < 0 || i >= a.n()) throw InvalidArgument("slice: index out of range");
  const std::size_t block = a.size() / a.n();
  const auto begin = a.entries().begin() + i * block;
  Slice out;
  out.mass = std::accumulate(begin, begin + block, 0.0);
  if (out.mass > 0.0) {
    std::vector<double> normalized(begin, begin + block);
    for (double& x : normalized) x /= out.mass;
    out.normalized.emplace(a.n(), a.k() - 1, std::move(normalized));
  }
  return out;
}

CountDistribution binomial_pmf(int k, double theta) {
  if (k < 1) throw InvalidArgument("binomial_pmf: k must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("binomial_pmf: theta outside [0, 1]");
  }
  std::vector<double> w;
  if (theta == 0.0 || theta == 1.0) {
    w.assign(static_cast<std::size_t>(k) + 1, 0.0);
    w[theta == 0.0 ? 0 : k] = 1.0;
  } else if (k <= kRecurrenceMaxTrials) {
    w = BinomialByRecurrence(k, theta);
  } else {
    w = BinomialByLogSpace(k, theta);
  }
  return CountDistribution(std::move(w));
}

CountDistribution mixture(std::span<const double> weights,
                          std::span<const CountDistribution> components) {
  if (weights.size() != components.size() || weights.empty()) {
    throw InvalidArgument("mixture: weights and components differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw InvalidArgument("mixture: weights sum to " + std::to_string(total));
  }
  const int k = components.front().k();
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (components[c].k() != k) {
      throw InvalidArgument("mixture: components have different k");
    }
    for (int t = 0; t <= k; ++t) out[t] += weights[c] * components[c][t];
  }
  return CountDistribution(std::move(out));
}

Tensor frequency_tensor(const BatchSet& batches, std::size_t cap) {
  if (batches.empty()) throw InvalidArgument("frequency_tensor: no batches");
  Tensor a(batches.n(), batches.k(), cap);
  const double unit = 1.0 / static_cast<double>(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    a[a.flat_index(batches[b])] += unit;
  }
  return a;
}

}  // namespace robustdist
