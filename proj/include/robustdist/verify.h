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

// Numeric checks of the inequalities behind the error bounds: binomial
// tensorization bounds, separation of binomial mixtures, and four scalar
// inequalities. Each check reports its worst margin (left side minus right
// side) over a grid; a margin >= -1e-9 means the inequality held.

#ifndef ROBUSTDIST_VERIFY_H_
#define ROBUSTDIST_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robustdist {

inline constexpr double kMarginTolerance = 1e-9;

struct LemmaCheckReport {
  std::string lemma_id;
  std::size_t grid_size = 0;
  double worst_margin = 0.0;
  std::string worst_point;
  double wall_ms = 0.0;

  bool held() const { return worst_margin >= -kMarginTolerance; }
};

// Exact 1/2 sum_t |B(k, theta1)(t) - B(k, theta2)(t)|.
double tv_binomial(int k, double theta1, double theta2);

// KL divergence between Bernoulli((1 - eps)/2) and Bernoulli((1 + eps)/2):
// eps * ln((1 + eps)/(1 - eps)). Requires eps in (0, 1/2).
double kl_bernoulli(double eps);

// Upper tensorization bound for the Bernoulli pair with means (1 -+ eps)/2,
// eps in (0, 1/2): TV of the k-fold products is at most eps*sqrt(2k), via
// sqrt(k * KL / 2). Also checks the single-sample TV equals eps.
LemmaCheckReport check_tensorization_upper(int k, double eps);

// Lower bound eps*sqrt(k)/15 for the same pair; requires
// eps in (0, 1/(15 sqrt(k))).
LemmaCheckReport check_tensorization_lower(int k, double eps);

// Mixtures of B(k, theta) with theta <= p_hi versus theta >= q_lo, where
// q_lo - p_hi >= eps and eps in (0, 1/(15 sqrt(k))), are at TV distance at
// least eps*sqrt(k)/15. Checks the cumulative-count witness and
// `random_mixtures` random mixtures on five grid points per side.
LemmaCheckReport check_mixture_separation(int k, double p_hi, double q_lo,
                                          double eps, std::uint64_t seed = 0,
                                          int random_mixtures = 20);

// Grid sweeps. `dense` refines every grid.
LemmaCheckReport sweep_tensorization_upper(bool dense = false);
LemmaCheckReport sweep_tensorization_lower(bool dense = false);
LemmaCheckReport sweep_mixture_separation(bool dense = false);

// (1 - eps)^a >= 1 - 2 a eps on [0, 1/2] x [0, 1].
LemmaCheckReport check_power_bernoulli(bool dense = false);
// (1 - a/x)^x is increasing in x > a, sampled for a in {0.5, 1, 2}.
LemmaCheckReport check_power_monotone(bool dense = false);
// (1 + a/n)^n (1 - a/m)^m >= 1/7 for n <= 50, max(n, 2) <= m <= 100,
// a in [0, 1.1 sqrt(n)].
LemmaCheckReport check_product_floor(bool dense = false);
// C(k, t) (t/k)^t ((k - t)/k)^(k - t) >= 1/(3 sqrt(t)), k <= 300.
LemmaCheckReport check_binomial_mode(bool dense = false);

// The left-hand sides of the last two checks.
double product_floor_value(int n, int m, double alpha);
double binomial_mode_value(int k, int t);

std::vector<LemmaCheckReport> check_scalar_inequalities(bool dense = false);

// Ids accepted by run_lemma, in suite order.
std::vector<std::string> lemma_ids();
// Throws InvalidArgument for an unknown id.
LemmaCheckReport run_lemma(std::string_view id, bool dense = false);
std::vector<LemmaCheckReport> run_lemma_suite(bool dense = false);

// CSV: lemma_id,grid_size,worst_margin,worst_point,wall_ms
void write_lemma_reports(std::ostream& out,
                         std::span<const LemmaCheckReport> reports);

}  // namespace robustdist

#endif  // ROBUSTDIST_VERIFY_H_
