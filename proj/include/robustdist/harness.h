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

// Monte Carlo experiments: simulate contaminated datasets, run estimators,
// score them against the ground truth, and persist the results as CSV.

#ifndef ROBUSTDIST_HARNESS_H_
#define ROBUSTDIST_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robustdist/adversary.h"
#include "robustdist/core.h"

namespace robustdist {

// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Algorithm { kEmpirical, kSubsetLp, kDistSet };

std::string_view algorithm_name(Algorithm algorithm);
// Accepts "empirical", "subsetlp", "distset".
Algorithm parse_algorithm(std::string_view name);

// Pooled frequency of every sample across all batches.
Distribution empirical_baseline(const BatchSet& batches);

// Flat key=value configuration; keys match the field names. Blank lines and
// lines starting with '#' are ignored.
struct ExperimentConfig {
  int n = 2;
  int k = 1;
  // 0 selects sample_multiplier * (n + k + ln(1/delta)) / eps^2, capped at
  // 10^6.
  std::size_t m = 0;
  int trials = 1;
  double eps = 0.0;
  double eta = 0.0;
  double delta = 0.1;
  std::string adversary = "point_mass:1";
  std::vector<Algorithm> algorithms = {Algorithm::kEmpirical};
  std::uint64_t seed = 0;
  std::string output_path;
  double sample_multiplier = 40.0;
  // "uniform", "dirichlet" (a fresh Dirichlet(1, ..., 1) draw per trial), or
  // a comma-separated probability vector.
  std::string truth = "uniform";
  Perturbation perturbation = Perturbation::kNone;
  // 1-based elements for the fixed shift.
  int shift_donor = 1;
  int shift_receiver = 2;
  // When false runtime_ms is written as 0 so output is byte-stable.
  bool record_runtime = false;

  static ExperimentConfig Parse(std::string_view text);
  static ExperimentConfig Load(const std::filesystem::path& path);
  std::string ToText() const;

  // Throws ConfigError describing the first problem found.
  void Validate() const;
  std::size_t resolved_m() const;
  AdversaryStrategy strategy() const;
};

struct TrialRecord {
  int trial_index = 0;
  std::string algorithm;
  int n = 0;
  int k = 0;
  std::size_t m = 0;
  double eps = 0.0;
  double eta = 0.0;
  std::string adversary;
  std::uint64_t seed_used = 0;
  double tv_error = 0.0;
  double runtime_ms = 0.0;
  bool degraded = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentOutput {
  std::vector<TrialRecord> records;
  // Parallel to records.
  std::vector<Distribution> truths;
  std::vector<Distribution> estimates;
};

// Validates, then runs every trial. Trial t uses derive_seed(seed, t).
// Estimator exceptions become degraded records scored against the uniform
// distribution.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Simulates one trial's dataset and ground truth.
struct SimulatedTrial {
  Distribution truth;
  Dataset data;
};
SimulatedTrial simulate_trial(const ExperimentConfig& config,
                              std::uint64_t trial_seed);

struct Estimate {
  Distribution q;
  bool degraded = false;
};
Estimate run_estimator(Algorithm algorithm, const BatchSet& batches, double eps,
                       double eta, double delta);

// Columns: trial_index, algorithm, n, k, m, eps, eta, adversary, seed_used,
// tv_error, runtime_ms, degraded. Fields containing commas are quoted.
void write_results(const std::filesystem::path& path,
                   const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_results(const std::filesystem::path& path);

// Long-format sidecar: trial_index,algorithm,role,element,probability with
// role "truth" or "estimate" and 1-based elements.
std::filesystem::path distributions_path(const std::filesystem::path& results);
void write_distribution_dump(const std::filesystem::path& path,
                             const ExperimentOutput& output);

}  // namespace robustdist

#endif  // ROBUSTDIST_HARNESS_H_
