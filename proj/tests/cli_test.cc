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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robustdist/adversary.h"
#include "robustdist/batch_io.h"
#include "robustdist/core.h"
#include "robustdist/harness.h"

namespace robustdist {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("robustdist_cli_" +
            std::string(
                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(const std::string& args) {
    const std::string cmd = std::string("\"") + ROBUSTDIST_CLI_PATH + "\" " +
                            args + " > \"" + (dir_ / "stdout").string() +
                            "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Path(const std::string& name) const {
    return "\"" + (dir_ / name).string() + "\"";
  }

  std::string Read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateWritesBatchesAndProvenance) {
  ASSERT_EQ(Run("simulate --n 3 --k 4 --m 200 --eps 0.1 --adversary "
                "point_mass:2 --seed 9 --out " +
                Path("b.txt")),
            0);
  const BatchSet batches = read_batches(dir_ / "b.txt");
  EXPECT_EQ(batches.n(), 3);
  EXPECT_EQ(batches.k(), 4);
  EXPECT_EQ(batches.size(), 200u);
  const std::vector<bool> bad = read_provenance(provenance_path(dir_ / "b.txt"));
  EXPECT_EQ(std::count(bad.begin(), bad.end(), true), 20);
}

TEST_F(CliTest, SimulateMatchesFirstExperimentTrial) {
  ASSERT_EQ(Run("simulate --n 2 --k 3 --m 50 --eps 0.1 --seed 4 --p 0.3,0.7 "
                "--out " +
                Path("b.txt")),
            0);
  ExperimentConfig c;
  c.n = 2;
  c.k = 3;
  c.m = 50;
  c.eps = 0.1;
  c.seed = 4;
  c.truth = "0.3,0.7";
  const SimulatedTrial trial = simulate_trial(c, derive_seed(4, 0));
  EXPECT_EQ(read_batches(dir_ / "b.txt"), trial.data.batches);
}

TEST_F(CliTest, EstimateEmpiricalWritesDistribution) {
  std::ofstream(dir_ / "b.txt") << "# n=2 k=2\n1 1\n1 2\n";
  ASSERT_EQ(Run("estimate --algo empirical --batches " + Path("b.txt") +
                " --out " + Path("q.txt")),
            0);
  const Distribution q = read_distribution(dir_ / "q.txt");
  EXPECT_DOUBLE_EQ(q[0], 0.75);
  EXPECT_DOUBLE_EQ(q[1], 0.25);
}

TEST_F(CliTest, EstimateSubsetLpDumpsEstimates) {
  ASSERT_EQ(Run("simulate --n 2 --k 10 --m 4000 --eps 0.05 --p 0.4,0.6 "
                "--seed 1 --out " +
                Path("b.txt")),
            0);
  ASSERT_EQ(Run("estimate --algo subsetlp --batches " + Path("b.txt") +
                " --eps 0.05 --eta 0.05 --out " + Path("q.txt") +
                " --dump-subsets " + Path("s.csv")),
            0);
  EXPECT_EQ(read_distribution(dir_ / "q.txt").n(), 2);
  EXPECT_THAT(Read("s.csv"),
              ::testing::StartsWith(
                  "subset_bitmask,estimate,feasible_i,lp_solve_ms\n"));
}

TEST_F(CliTest, EstimateDistSetDumpsCandidates) {
  std::ofstream(dir_ / "b.txt") << "# n=2 k=2\n1 1\n1 2\n2 2\n";
  ASSERT_EQ(Run("estimate --algo distset --batches " + Path("b.txt") +
                " --out " + Path("q.txt") + " --dump-candidates " +
                Path("c.csv")),
            0);
  EXPECT_THAT(Read("c.csv"),
              ::testing::StartsWith("candidate_index,origin_path,l1_objective,"
                                    "tv_to_truth_if_known\n1,s1/leaf,"));
}

TEST_F(CliTest, DegradedEstimateExitsThree) {
  // Uniform-looking counts make every subset window infeasible.
  std::ostringstream text;
  text << "# n=2 k=20\n";
  for (int b = 0; b < 21; ++b) {
    for (int j = 0; j < 20; ++j) text << (j < b ? 1 : 2) << (j < 19 ? " " : "\n");
  }
  std::ofstream(dir_ / "b.txt") << text.str();
  EXPECT_EQ(Run("estimate --algo subsetlp --batches " + Path("b.txt") +
                " --eps 0.01 --eta 0.1 --out " + Path("q.txt")),
            3);
  EXPECT_EQ(read_distribution(dir_ / "q.txt").n(), 2);
}

TEST_F(CliTest, ExperimentWritesResultsAndDistributions) {
  std::ofstream(dir_ / "c.txt")
      << "n=2\nk=2\nm=300\ntrials=2\neps=0.1\nalgorithms=empirical,distset\n";
  ASSERT_EQ(Run("experiment --config " + Path("c.txt") + " --out " +
                Path("r.csv") + " --dump-distributions"),
            0);
  EXPECT_EQ(read_results(dir_ / "r.csv").size(), 4u);
  EXPECT_THAT(Read("r.csv.distributions.csv"),
              ::testing::StartsWith(
                  "trial_index,algorithm,role,element,probability\n"));
}

TEST_F(CliTest, VerifyLemmasWritesReport) {
  ASSERT_EQ(Run("verify-lemmas --lemma binomial_mode --out " + Path("v.csv")),
            0);
  EXPECT_THAT(Read("v.csv"),
              ::testing::StartsWith("lemma_id,grid_size,worst_margin,"
                                    "worst_point,wall_ms\nbinomial_mode,"));
}

TEST_F(CliTest, LowerBoundDumpsTensors) {
  ASSERT_EQ(Run("lowerbound --eps 0.1 --eta 0.05 --k 3 --out " +
                Path("lb.txt")),
            0);
  const std::string text = Read("lb.txt");
  EXPECT_THAT(text, ::testing::HasSubstr("[n_p] 8\n"));
  EXPECT_THAT(text, ::testing::HasSubstr("[mixture] 8\n"));
  EXPECT_THAT(text, ::testing::StartsWith("# eps=0.10000000000000001 eta="));
}

TEST_F(CliTest, InvalidConfigExitsTwo) {
  std::ofstream(dir_ / "c.txt") << "n=2\nk=0\n";
  EXPECT_EQ(Run("experiment --config " + Path("c.txt") + " --out " +
                Path("r.csv")),
            2);
  EXPECT_EQ(Run("lowerbound --eps 0.7 --eta 0 --k 2 --out " + Path("x")), 2);
  EXPECT_EQ(Run("estimate --algo magic --batches x --out y"), 2);
  EXPECT_EQ(Run("simulate --n 2"), 2);
}

TEST_F(CliTest, IoErrorExitsFour) {
  EXPECT_EQ(Run("estimate --algo empirical --batches " + Path("missing.txt") +
                " --out " + Path("q.txt")),
            4);
  std::ofstream(dir_ / "b.txt") << "# n=2 k=2\n1 3\n";
  EXPECT_EQ(Run("estimate --algo empirical --batches " + Path("b.txt") +
                " --out " + Path("q.txt")),
            4);
  EXPECT_EQ(Run("verify-lemmas --lemma binomial_mode --out " +
                Path("no/such/dir/v.csv")),
            4);
}

}  // namespace
}  // namespace robustdist
