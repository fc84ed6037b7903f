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

// Subset-mass learner.
//
// For a subset S, every batch contributes its count of samples in S, giving
// an empirical count distribution f over {0..k}. Window i is accepted when f
// is within total variation 2*eps of some mixture of B(k, i*eta + j*eps/k),
// j = 0..tot; the first accepted window yields the estimate (i + 2)*eta.
// Repeating this for every S and then finding a distribution whose subset
// masses all lie within 3*eta + 60*eps/sqrt(k) of the estimates gives the
// learned distribution.

#ifndef ROBUSTDIST_SUBSET_LP_H_
#define ROBUSTDIST_SUBSET_LP_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "robustdist/core.h"
#include "robustdist/lp.h"

namespace robustdist {

class BinomialEstParams {
 public:
  // eps in (0, 1/15), eta in (0, 1/8], k >= 1.
  BinomialEstParams(double eps, double eta, int k);

  double eps() const { return eps_; }
  double eta() const { return eta_; }
  int k() const { return k_; }
  // Number of grid steps of width eps/k spanning a window of width 4*eta.
  int tot() const { return tot_; }
  // Largest window index tried (windows are 0..max_window()).
  int max_window() const { return max_window_; }
  // Accuracy of a single subset estimate: 3*eta + 60*eps/sqrt(k).
  double subset_radius() const;
  // eps below 1/900, where the stated constants are proved.
  bool within_proved_range() const;

 private:
  double eps_;
  double eta_;
  int k_;
  int tot_;
  int max_window_;
};

struct SubsetEstimate {
  std::uint64_t subset = 0;
  // Absent when no window was feasible.
  std::optional<double> estimate;
  // First feasible window, or -1.
  int window = -1;
  double lp_solve_ms = 0.0;
};

int count_in_subset(std::span<const int> batch, std::uint64_t subset);

CountDistribution empirical_count_distribution(const BatchSet& batches,
                                               std::uint64_t subset);

// Feasibility program for one window over (alpha_0..alpha_tot, s_0..s_k):
// |sum_j alpha_j B_j(t) - f_t| <= s_t, sum_t s_t <= 4*eps, sum alpha = 1.
LpProblem window_program(const CountDistribution& f,
                         const BinomialEstParams& params, int window);

SubsetEstimate binomial_est(const CountDistribution& f,
                            const BinomialEstParams& params,
                            const LpOptions& lp_options = {});
SubsetEstimate binomial_est(const BatchSet& batches, std::uint64_t subset,
                            const BinomialEstParams& params,
                            const LpOptions& lp_options = {});

struct SubsetLpOptions {
  int max_n = 12;
  LpOptions lp;
};

struct SubsetLpResult {
  Distribution q;
  // Set when some subset estimate failed or the consistency program was
  // infeasible; q then minimizes the largest deviation instead.
  bool degraded = false;
  // eta actually used (eps/sqrt(k) when the caller passed 0).
  double eta = 0.0;
  bool within_proved_range = true;
  double radius = 0.0;
  // max over estimated S of |q(S) - estimate(S)|.
  double max_deviation = 0.0;
  std::vector<SubsetEstimate> estimates;
  std::vector<std::uint64_t> failed_subsets;
  std::vector<std::uint64_t> conflicting_subsets;
};

// Finds q on the simplex minimizing max_S |q(S) - estimate(S)| over the
// subsets that have an estimate; not degraded when that maximum is within
// `radius`.
SubsetLpResult solve_consistency_program(int n,
                                         std::span<const SubsetEstimate> estimates,
                                         double radius,
                                         const LpOptions& lp_options = {});

// Full learner. eta = 0 substitutes eps/sqrt(k). delta in (0, 1) is
// validated but only affects how many batches a caller should collect.
SubsetLpResult learn_subset_lp(const BatchSet& batches, double eps, double eta,
                               double delta, const SubsetLpOptions& options = {});

// CSV: subset_bitmask,estimate,feasible_i,lp_solve_ms
void write_subset_estimates(const std::filesystem::path& path,
                            std::span<const SubsetEstimate> estimates);

}  // namespace robustdist

#endif  // ROBUSTDIST_SUBSET_LP_H_
