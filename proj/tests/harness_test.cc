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

#include "robustdist/harness.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robustdist/batch_io.h"
#include "robustdist/core.h"

namespace robustdist {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::path(::testing::TempDir()) / name;
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

TEST(EmpiricalBaselineTest, SingleBatchIsPointMass) {
  BatchSet batches(3, 4);
  batches.push_back(std::vector<int>{0, 0, 0, 0});
  EXPECT_THAT(empirical_baseline(batches).probs(), ElementsAre(1.0, 0.0, 0.0));
  EXPECT_THROW(empirical_baseline(BatchSet(3, 4)), InvalidArgument);
}

TEST(EmpiricalBaselineTest, ConvergesWithoutAdversary) {
  const Distribution p({0.1, 0.6, 0.3});
  const BatchSet batches = sample_good_batches({.target = p}, 5, 100000, 3);
  EXPECT_LT(tv_distance(empirical_baseline(batches), p), 0.005);
}

TEST(EmpiricalBaselineTest, PointMassShiftMatchesAnalyticValue) {
  ExperimentConfig c;
  c.n = 3;
  c.k = 10;
  c.m = 100000;
  c.eps = 0.1;
  c.truth = "0.2,0.5,0.3";
  c.adversary = "point_mass:1";
  const SimulatedTrial trial = simulate_trial(c, 7);
  const double expected = 0.1 * (1 - 0.2);
  EXPECT_NEAR(tv_distance(empirical_baseline(trial.data.batches), trial.truth),
              expected, 0.01);
}

TEST(ExperimentConfigTest, ParsesAllKeys) {
  const ExperimentConfig c = ExperimentConfig::Parse(
      "# comment\n"
      "n=3\nk=4\nm=500\ntrials=7\neps=0.05\neta=0.01\ndelta=0.2\n"
      "adversary=mass_shift:0.1,0.1,0.8\nalgorithms=empirical, distset\n"
      "seed=18446744073709551615\noutput_path=out.csv\nsample_multiplier=10\n"
      "truth=0.5,0.3,0.2\nperturbation=fixed_shift\nshift_donor=1\n"
      "shift_receiver=3\nrecord_runtime=true\n\n");
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.k, 4);
  EXPECT_EQ(c.m, 500u);
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.eps, 0.05);
  EXPECT_EQ(c.eta, 0.01);
  EXPECT_EQ(c.delta, 0.2);
  EXPECT_EQ(c.adversary, "mass_shift:0.1,0.1,0.8");
  EXPECT_THAT(c.algorithms, ElementsAre(Algorithm::kEmpirical, Algorithm::kDistSet));
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.output_path, "out.csv");
  EXPECT_EQ(c.sample_multiplier, 10.0);
  EXPECT_EQ(c.perturbation, Perturbation::kFixedShift);
  EXPECT_EQ(c.shift_receiver, 3);
  EXPECT_TRUE(c.record_runtime);
  EXPECT_NO_THROW(c.Validate());

  const ExperimentConfig again = ExperimentConfig::Parse(c.ToText());
  EXPECT_EQ(again.ToText(), c.ToText());
}

TEST(ExperimentConfigTest, RejectsMalformedText) {
  EXPECT_THROW(ExperimentConfig::Parse("n=3\nbogus=1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Parse("n=3\nn=4\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Parse("n=three\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Parse("just words\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Parse("algorithms=magic\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Parse("perturbation=wobble\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::Load(TempPath("does_not_exist.cfg")), IoError);
}

TEST(ExperimentConfigTest, ValidationCatchesEstimatorPreconditions) {
  ExperimentConfig base;
  base.n = 3;
  base.k = 4;
  base.m = 100;
  base.eps = 0.05;

  ExperimentConfig c = base;
  c.algorithms = {Algorithm::kSubsetLp};
  c.eps = 0.1;
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.algorithms = {Algorithm::kSubsetLp};
  c.eta = 0.2;
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.algorithms = {Algorithm::kDistSet};
  c.k = 40;
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.adversary = "lemma1";
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.adversary = "point_mass:4";
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.truth = "0.5,0.5";
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.trials = 0;
  EXPECT_THROW(c.Validate(), ConfigError);

  c = base;
  c.m = 0;
  c.eps = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(ExperimentConfigTest, AutomaticBatchCount) {
  ExperimentConfig c;
  c.n = 2;
  c.k = 20;
  c.eps = 0.02;
  c.delta = 0.1;
  EXPECT_EQ(c.resolved_m(), 1000000u);
  c.eps = 0.5;
  c.sample_multiplier = 1.0;
  EXPECT_EQ(c.resolved_m(),
            static_cast<std::size_t>(std::ceil((22 + std::log(10.0)) / 0.25)));
  c.m = 17;
  EXPECT_EQ(c.resolved_m(), 17u);
}

TEST(RunExperimentTest, SingleCleanTrialMatchesRecomputation) {
  ExperimentConfig c;
  c.n = 3;
  c.k = 5;
  c.m = 2000;
  c.eps = 0.0;
  c.truth = "0.2,0.3,0.5";
  c.seed = 99;
  const ExperimentOutput out = run_experiment(c);
  ASSERT_EQ(out.records.size(), 1u);
  const TrialRecord& r = out.records[0];
  EXPECT_EQ(r.algorithm, "empirical");
  EXPECT_EQ(r.seed_used, derive_seed(99, 0));
  const SimulatedTrial trial = simulate_trial(c, r.seed_used);
  EXPECT_EQ(trial.data.m(), 2000u);
  EXPECT_EQ(r.tv_error,
            tv_distance(Distribution({0.2, 0.3, 0.5}),
                        empirical_baseline(trial.data.batches)));
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.runtime_ms, 0.0);
}

TEST(RunExperimentTest, DeterministicCsv) {
  ExperimentConfig c;
  c.n = 3;
  c.k = 3;
  c.m = 3000;
  c.trials = 3;
  c.eps = 0.05;
  c.eta = 0.02;
  c.truth = "dirichlet";
  c.perturbation = Perturbation::kPerBatchRandom;
  c.adversary = "replay_worst:1+2";
  c.algorithms = {Algorithm::kEmpirical, Algorithm::kSubsetLp,
                  Algorithm::kDistSet};
  c.seed = 5;
  const auto a = TempPath("det_a.csv");
  const auto b = TempPath("det_b.csv");
  write_results(a, run_experiment(c).records);
  write_results(b, run_experiment(c).records);
  const std::string text = Slurp(a);
  EXPECT_EQ(text, Slurp(b));
  EXPECT_THAT(text, HasSubstr(",subsetlp,3,3,3000,0.050000000000000003,"));
}

TEST(RunExperimentTest, DirichletTruthVariesPerTrial) {
  ExperimentConfig c;
  c.n = 4;
  c.k = 2;
  c.m = 10;
  c.trials = 3;
  c.truth = "dirichlet";
  const ExperimentOutput out = run_experiment(c);
  EXPECT_NE(out.truths[0], out.truths[1]);
  EXPECT_NE(out.truths[1], out.truths[2]);
}

TEST(RunExperimentTest, DumpedDistributionsReproduceScores) {
  ExperimentConfig c;
  c.n = 3;
  c.k = 4;
  c.m = 5000;
  c.trials = 4;
  c.eps = 0.05;
  c.truth = "dirichlet";
  c.adversary = "mass_shift:0.1,0.1,0.8";
  c.algorithms = {Algorithm::kEmpirical, Algorithm::kDistSet};
  const ExperimentOutput out = run_experiment(c);
  const auto results = TempPath("scores.csv");
  write_results(results, out.records);
  write_distribution_dump(distributions_path(results), out);

  // Oracle: rebuild p and p-hat from the sidecar and rescore.
  std::map<std::pair<int, std::string>, std::vector<double>> truth, estimate;
  std::ifstream in(distributions_path(results));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "trial_index,algorithm,role,element,probability");
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string trial, algo, role, element, prob;
    std::getline(row, trial, ',');
    std::getline(row, algo, ',');
    std::getline(row, role, ',');
    std::getline(row, element, ',');
    std::getline(row, prob, ',');
    auto& target = role == "truth" ? truth : estimate;
    target[{std::stoi(trial), algo}].push_back(parse_real(prob));
  }
  for (const TrialRecord& r : read_results(results)) {
    const auto& p = truth.at({r.trial_index, r.algorithm});
    const auto& q = estimate.at({r.trial_index, r.algorithm});
    double tv = 0.0;
    for (std::size_t e = 0; e < p.size(); ++e) tv += std::abs(p[e] - q[e]);
    EXPECT_NEAR(tv / 2, r.tv_error, 1e-12);
  }
}

TEST(RunExperimentTest, PairedLowerBoundRunsAreHardOnOneSide) {
  ExperimentConfig c;
  c.n = 2;
  c.k = 2;
  c.m = 100000;
  c.trials = 5;
  c.eps = 0.05;
  c.eta = 0.1;
  c.algorithms = {Algorithm::kEmpirical, Algorithm::kSubsetLp,
                  Algorithm::kDistSet};
  c.adversary = "lemma1";
  const ExperimentOutput p_side = run_experiment(c);
  c.adversary = "lemma1:q";
  const ExperimentOutput q_side = run_experiment(c);
  const LowerBoundInstance inst = lower_bound_instance(0.05, 0.1, 2);
  const double half_gap = tv_distance(inst.p, inst.q) / 2;
  for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
    std::vector<double> ep, eq;
    for (int t = 0; t < c.trials; ++t) {
      ep.push_back(p_side.records[t * 3 + a].tv_error);
      eq.push_back(q_side.records[t * 3 + a].tv_error);
    }
    EXPECT_GE(std::max(Median(ep), Median(eq)), half_gap - 0.05)
        << p_side.records[a].algorithm;
  }
  EXPECT_EQ(p_side.truths[0], inst.p);
  EXPECT_EQ(q_side.truths[0], inst.q);
}

TEST(ResultsIoTest, EmptyListWritesHeaderOnly) {
  const auto path = TempPath("empty.csv");
  write_results(path, {});
  EXPECT_EQ(Slurp(path),
            "trial_index,algorithm,n,k,m,eps,eta,adversary,seed_used,"
            "tv_error,runtime_ms,degraded\n");
  EXPECT_TRUE(read_results(path).empty());
}

TEST(ResultsIoTest, RoundTripsHundredRecords) {
  std::vector<TrialRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back({.trial_index = i,
                       .algorithm = i % 2 ? "subsetlp" : "distset",
                       .n = 3,
                       .k = i + 1,
                       .m = 1000u + i,
                       .eps = 0.1 / (i + 1),
                       .eta = 1.0 / 3,
                       .adversary = i % 3 ? "mass_shift:0.1,0.2,0.7" : "lemma1",
                       .seed_used = 0xFFFFFFFFFFFFFFFFULL - i,
                       .tv_error = std::sqrt(i) / 11,
                       .runtime_ms = i * 0.7,
                       .degraded = i % 5 == 0});
  }
  const auto path = TempPath("roundtrip.csv");
  write_results(path, records);
  EXPECT_EQ(read_results(path), records);
}

TEST(ResultsIoTest, MalformedRowNamesLine) {
  const auto path = TempPath("bad.csv");
  {
    std::ofstream out(path);
    out << "trial_index,algorithm,n,k,m,eps,eta,adversary,seed_used,tv_error,"
           "runtime_ms,degraded\n"
        << "0,empirical,2,3,10,0.1,0,lemma1,5,0.2,0,0\n"
        << "1,empirical,2,3,10,zero,0,lemma1,5,0.2,0,0\n";
  }
  try {
    read_results(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_THAT(e.what(), HasSubstr("bad.csv:3:"));
  }
  EXPECT_THROW(read_results(TempPath("missing.csv")), IoError);
}

}  // namespace
}  // namespace robustdist
