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

// Shared vocabulary: probability vectors over [n], n^k probability tensors,
// count distributions over {0..k}, batches of samples, and total variation
// distance between all of them.
//
// Element indices are 0-based in every C++ API. Files, the CLI and the
// Python module use 1-based indices and convert at the boundary.

#ifndef ROBUSTDIST_CORE_H_
#define ROBUSTDIST_CORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace robustdist {

// Entries of a probability vector or tensor must sum to 1 within this.
inline constexpr double kProbSumTolerance = 1e-9;

// Dense tensors larger than this many entries are rejected.
inline constexpr std::size_t kDefaultTensorCap = 10'000'000;

// Precondition or shape violations.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A probability vector over [n].
class Distribution {
 public:
  // Validates: n >= 1, each entry in [0, 1] (up to rounding of 1e-9), and
  // the entries sum to 1 within kProbSumTolerance. Never renormalizes.
  explicit Distribution(std::vector<double> probs);

  static Distribution Uniform(int n);
  static Distribution PointMass(int n, int element);
  // Two-point distribution (1 - mean, mean); element 1 is the "success".
  static Distribution Bernoulli(double mean);

  int n() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }

  // Mass of the subset encoded by `mask` (bit i set means element i in S).
  double mass(std::uint64_t mask) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

// Distribution over counts {0, 1, ..., k}.
class CountDistribution {
 public:
  explicit CountDistribution(std::vector<double> weights);

  int k() const { return static_cast<int>(weights_.size()) - 1; }
  double operator[](int t) const { return weights_[static_cast<std::size_t>(t)]; }
  const std::vector<double>& weights() const { return weights_; }

  // Probability of {0, ..., t}.
  double cdf(int t) const;

 private:
  std::vector<double> weights_;
};

// Dense n^k tensor. Entry (i1, ..., ik) lives at flat offset
// i1*n^(k-1) + ... + ik, so slice i is a contiguous block.
class Tensor {
 public:
  // All-zero tensor.
  Tensor(int n, int k, std::size_t cap = kDefaultTensorCap);
  Tensor(int n, int k, std::vector<double> entries,
         std::size_t cap = kDefaultTensorCap);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return entries_.size(); }

  double operator[](std::size_t flat) const { return entries_[flat]; }
  double& operator[](std::size_t flat) { return entries_[flat]; }
  double at(std::span<const int> index) const;

  const std::vector<double>& entries() const { return entries_; }
  std::size_t flat_index(std::span<const int> index) const;

  double sum() const;
  // Nonnegative up to -tol and summing to 1 within kProbSumTolerance.
  bool is_probability(double negative_tol = 0.0) const;

 private:
  int n_;
  int k_;
  std::vector<double> entries_;
};

// n^k with overflow and cap checks.
std::size_t checked_tensor_size(int n, int k,
                                std::size_t cap = kDefaultTensorCap);

// Fixed-length batches over alphabet [n], stored contiguously.
class BatchSet {
 public:
  BatchSet(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return k_ == 0 ? 0 : samples_.size() / k_; }
  bool empty() const { return samples_.empty(); }

  std::span<const int> operator[](std::size_t i) const {
    return {samples_.data() + i * k_, static_cast<std::size_t>(k_)};
  }
  // Throws InvalidArgument unless the batch has length k with entries in
  // [0, n).
  void push_back(std::span<const int> batch);
  void append(const BatchSet& other);
  void reserve(std::size_t batches) { samples_.reserve(batches * k_); }

  const std::vector<int>& flat() const { return samples_; }

  friend bool operator==(const BatchSet&, const BatchSet&) = default;

 private:
  int n_;
  int k_;
  std::vector<int> samples_;
};

double tv_distance(const Distribution& u, const Distribution& v);
double tv_distance(const CountDistribution& u, const CountDistribution& v);
double tv_distance(const Tensor& a, const Tensor& b);

Tensor tensor_power(const Distribution& p, int k,
                    std::size_t cap = kDefaultTensorCap);

// Distribution of the first coordinate.
Distribution marginal(const Tensor& a);

struct Slice {
  double mass = 0.0;
  // Absent when mass is zero.
  std::optional<Tensor> normalized;
};

// Restricts the first index to `i`; requires k >= 2.
Slice slice(const Tensor& a, int i);

// B(k, theta). Multiplicative recurrence up to k = 100, log space beyond.
CountDistribution binomial_pmf(int k, double theta);

CountDistribution mixture(std::span<const double> weights,
                          std::span<const CountDistribution> components);

// Fraction of batches equal to each ordered index tuple.
Tensor frequency_tensor(const BatchSet& batches,
                        std::size_t cap = kDefaultTensorCap);

}  // namespace robustdist

#endif  // ROBUSTDIST_CORE_H_
