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

// Tensor learner for the unperturbed regime.
//
// Candidates are the marginals of every normalized slice reachable by
// repeatedly fixing the leading coordinate; the learner returns the
// candidate q whose k-th tensor power is closest to the empirical
// frequency tensor.

#ifndef ROBUSTDIST_DIST_SET_H_
#define ROBUSTDIST_DIST_SET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "robustdist/core.h"

namespace robustdist {

struct CandidateSet {
  // Deduplicated at 1e-12 (max abs difference), first occurrence kept.
  std::vector<Distribution> candidates;
  // Path that produced each kept candidate: slice choices "s<i>" (1-based)
  // joined by '/', ending in "marginal" or "leaf".
  std::vector<std::string> origins;
  // Candidates produced before deduplication; (n^k - 1)/(n - 1) when no
  // slice has zero mass.
  std::size_t raw_count = 0;
  std::size_t skipped_slices = 0;
  // Set when some candidate summed to 1 only within more than 1e-9 and had
  // to be renormalized.
  bool renormalized = false;
};

// Requires a probability tensor. Enumeration order: slices in index order,
// depth first, marginal last.
CandidateSet dist_set(const Tensor& a);

struct TensorFit {
  CandidateSet set;
  // Total variation between A and each candidate's k-th power.
  std::vector<double> objectives;
  // Index of the first minimizer.
  std::size_t best = 0;
  Distribution q0;
  double objective = 0.0;
};

TensorFit dist_set_tensor_input(const Tensor& a,
                                std::size_t cap = kDefaultTensorCap);

// Builds the frequency tensor of `batches` and fits it. Throws on an empty
// batch set.
TensorFit learn_tensor(const BatchSet& batches,
                       std::size_t cap = kDefaultTensorCap);

// CSV: candidate_index,origin_path,l1_objective,tv_to_truth_if_known. The
// last column is empty without a truth.
void write_candidates(const std::filesystem::path& path, const TensorFit& fit,
                      const std::optional<Distribution>& truth = std::nullopt);

}  // namespace robustdist

#endif  // ROBUSTDIST_DIST_SET_H_
