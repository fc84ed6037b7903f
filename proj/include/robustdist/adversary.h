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

// Data generation for the contaminated batch model: good batches drawn from
// perturbations of the target, adversarial batches chosen after the good
// ones are known, and the two-point instance on which no estimator can beat
// 2*eta + eps/sqrt(2k).

#ifndef ROBUSTDIST_ADVERSARY_H_
#define ROBUSTDIST_ADVERSARY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustdist/core.h"
#include "robustdist/rng.h"

namespace robustdist {

enum class Perturbation {
  kNone,
  // Moves eta mass from `donor` to `receiver` for every batch.
  kFixedShift,
  // Moves eta mass between a fresh random pair for each batch. Donors are
  // drawn among elements holding at least eta mass.
  kPerBatchRandom,
};

struct GoodBatchSpec {
  Distribution target;
  double eta = 0.0;
  Perturbation perturbation = Perturbation::kNone;
  int donor = 0;
  int receiver = 1;
};

// p with `amount` moved from donor to receiver. Throws InvalidArgument when
// the donor holds less than `amount`.
Distribution shift_mass(const Distribution& p, int donor, int receiver,
                        double amount);

// The distribution a single good batch is drawn from.
Distribution draw_batch_distribution(const GoodBatchSpec& spec, Rng& rng);

// `count` batches, each k i.i.d. draws from its own perturbed distribution.
BatchSet sample_good_batches(const GoodBatchSpec& spec, int k,
                             std::size_t count, std::uint64_t seed);

// The two-point lower-bound construction. Bernoulli means are the
// probability of element 1 (0-based), so tensor index bits read 0 -> element
// 0 and 1 -> element 1, first coordinate most significant.
struct LowerBoundInstance {
  Distribution p;
  Distribution q;
  Distribution p_prime;
  Distribution q_prime;
  Tensor n_p;
  Tensor n_q;
  double eps;
  double eta;
  int k;
  // Total mass of the entrywise maximum of p'^k and q'^k.
  double alpha;

  // (1 - eps) p'^k + eps N_p, which equals (1 - eps) q'^k + eps N_q.
  Tensor mixture_p() const;
  Tensor mixture_q() const;
};

// Requires eps in (0, 1/2), eta in [0, 1/4), k >= 1.
LowerBoundInstance lower_bound_instance(double eps, double eta, int k);

enum class AdversaryKind { kPointMass, kMassShift, kReplayWorst, kLowerBound };

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::kPointMass;
  // kPointMass: the repeated element.
  int element = 0;
  // kMassShift: the distribution bad batches are drawn from.
  std::optional<Distribution> toward;
  // kReplayWorst: subset whose counts decide "most extreme".
  std::uint64_t target_set = 1;
  // kLowerBound: perturbation radius of the instance, and which side
  // (N_p or N_q) to draw from.
  double eta = 0.0;
  bool q_side = false;

  static AdversaryStrategy PointMass(int element);
  static AdversaryStrategy MassShift(Distribution toward);
  static AdversaryStrategy ReplayWorst(std::uint64_t target_set = 1);
  static AdversaryStrategy LowerBound(double eta, bool q_side = false);

  // Parses "point_mass:<1-based element>", "mass_shift:<p1,p2,...>",
  // "mass_shift:<file>", "replay_worst[:<1-based elements joined by +>]" and
  // "lemma1". The lemma1 eta is filled in by the caller.
  static AdversaryStrategy Parse(std::string_view text);

  // Stable textual id used in result files.
  std::string id() const;
};

// Produces exactly `count` valid batches over [p.n()]. The realized good
// batches are available to every strategy.
BatchSet generate_adversarial_batches(const AdversaryStrategy& strategy,
                                      const BatchSet& good,
                                      const Distribution& p, double eps, int k,
                                      std::size_t count, std::uint64_t seed);

struct Dataset {
  BatchSet batches;
  // Simulation-only provenance; estimators never read this.
  std::vector<bool> is_bad;
  double eps = 0.0;
  double eta = 0.0;

  std::size_t m() const { return batches.size(); }
  int n() const { return batches.n(); }
  int k() const { return batches.k(); }
};

// round(m * eps) with exact halves rounded down.
std::size_t bad_batch_count(std::size_t m, double eps);

// Concatenates and shuffles by seed; eps is |bad| / m.
Dataset assemble_dataset(const BatchSet& good, const BatchSet& bad,
                         std::uint64_t seed, double eta = 0.0);

}  // namespace robustdist

#endif  // ROBUSTDIST_ADVERSARY_H_
