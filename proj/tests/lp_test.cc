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

#include "robustdist/lp.h"

#include <limits>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "lp_oracle.h"
#include "robustdist/core.h"

namespace robustdist {
namespace {

using testing::RandomSmallLp;
using testing::VertexEnumerationOracle;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LpFeasibleTest, PinnedPoint) {
  LpProblem lp(1);
  lp.add_constraint({1.0}, Relation::kGreaterEqual, 0.0);
  lp.add_constraint({1.0}, Relation::kLessEqual, 1.0);
  lp.add_constraint({1.0}, Relation::kEqual, 0.5);
  const LpSolution s = lp_feasible(lp);
  ASSERT_TRUE(s.feasible());
  EXPECT_NEAR(s.assignment[0], 0.5, 1e-12);
}

TEST(LpFeasibleTest, EmptyInterval) {
  LpProblem lp(1);
  lp.add_constraint({1.0}, Relation::kGreaterEqual, 1.0);
  lp.add_constraint({1.0}, Relation::kLessEqual, 0.0);
  EXPECT_EQ(lp_feasible(lp).status, LpStatus::kInfeasible);
}

TEST(LpFeasibleTest, ZeroRows) {
  LpProblem ok(2);
  ok.add_constraint({0.0, 0.0}, Relation::kLessEqual, 1.0);
  EXPECT_TRUE(lp_feasible(ok).feasible());
  LpProblem bad(2);
  bad.add_constraint({0.0, 0.0}, Relation::kGreaterEqual, 1.0);
  EXPECT_FALSE(lp_feasible(bad).feasible());
}

TEST(LpFeasibleTest, RejectsMalformedInput) {
  LpProblem lp(2);
  EXPECT_THROW(lp.add_constraint({1.0}, Relation::kLessEqual, 1.0),
               InvalidArgument);
  EXPECT_THROW(lp.add_constraint({1.0, 1.0}, Relation::kLessEqual, kInf),
               InvalidArgument);
  EXPECT_THROW(lp.set_bounds(5, 0, 1), InvalidArgument);
  EXPECT_THROW(LpProblem(0), InvalidArgument);
  EXPECT_THROW(lp_minimize(lp), InvalidArgument);
}

TEST(LpFeasibleTest, GeneralBounds) {
  // x in [-3, -1], y free, z <= 2 with no lower bound; x + y + z = 0,
  // y >= 4.
  LpProblem lp(3);
  lp.set_bounds(0, -3, -1);
  lp.set_bounds(1, -kInf, kInf);
  lp.set_bounds(2, -kInf, 2);
  lp.add_constraint({1, 1, 1}, Relation::kEqual, 0);
  lp.add_constraint({0, 1, 0}, Relation::kGreaterEqual, 4);
  const LpSolution s = lp_feasible(lp);
  ASSERT_TRUE(s.feasible());
  EXPECT_LE(lp.max_violation(s.assignment), 1e-9);
}

TEST(LpMinimizeTest, Examples) {
  LpProblem a(1);
  a.add_constraint({1.0}, Relation::kGreaterEqual, 2.0);
  a.set_objective({1.0});
  const LpSolution sa = lp_minimize(a);
  ASSERT_TRUE(sa.feasible());
  EXPECT_NEAR(sa.objective_value, 2.0, 1e-12);

  LpProblem b(2);
  b.add_constraint({1.0, 1.0}, Relation::kGreaterEqual, 1.0);
  b.set_objective({1.0, 1.0});
  EXPECT_NEAR(lp_minimize(b).objective_value, 1.0, 1e-12);
}

TEST(LpMinimizeTest, MaximizeAndUnbounded) {
  LpProblem lp(2);
  lp.add_constraint({1.0, 2.0}, Relation::kLessEqual, 4.0);
  lp.add_constraint({3.0, 1.0}, Relation::kLessEqual, 6.0);
  lp.set_objective({1.0, 1.0}, Sense::kMaximize);
  const LpSolution s = lp_minimize(lp);
  ASSERT_TRUE(s.feasible());
  EXPECT_NEAR(s.objective_value, 2.8, 1e-12);

  LpProblem open(1);
  open.set_objective({-1.0});
  EXPECT_EQ(lp_minimize(open).status, LpStatus::kUnbounded);

  LpProblem none(1);
  none.add_constraint({1.0}, Relation::kLessEqual, -1.0);
  none.set_objective({1.0});
  EXPECT_EQ(lp_minimize(none).status, LpStatus::kInfeasible);
}

TEST(LpFeasibleTest, DegenerateProblemTerminates) {
  // A classic cycling example for the textbook largest-coefficient rule.
  LpProblem lp(4);
  lp.add_constraint({0.5, -5.5, -2.5, 9}, Relation::kLessEqual, 0);
  lp.add_constraint({0.5, -1.5, -0.5, 1}, Relation::kLessEqual, 0);
  lp.add_constraint({1, 0, 0, 0}, Relation::kLessEqual, 1);
  lp.set_objective({10, -57, -9, -24}, Sense::kMaximize);
  LpOptions options;
  options.degenerate_run = 2;
  const LpSolution s = lp_minimize(lp, options);
  ASSERT_TRUE(s.feasible());
  EXPECT_NEAR(s.objective_value, 1.0, 1e-9);
}

TEST(LpFeasibleTest, DebugDumpWritesTableaus) {
  LpProblem lp(2);
  lp.add_constraint({1.0, 1.0}, Relation::kEqual, 1.0);
  std::ostringstream log;
  LpOptions options;
  options.debug = &log;
  EXPECT_TRUE(lp_feasible(lp, options).feasible());
  EXPECT_THAT(log.str(), ::testing::HasSubstr("tableau after pivot"));
}

TEST(LpOracleTest, FeasibilityMatchesVertexEnumeration) {
  std::mt19937_64 gen(2024);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LpProblem lp = RandomSmallLp(gen, /*with_box=*/false);
    const bool expected = VertexEnumerationOracle(lp).feasible;
    const LpSolution s = lp_feasible(lp);
    ASSERT_EQ(s.feasible(), expected) << "trial " << trial;
    if (s.feasible()) {
      ++feasible;
      EXPECT_LE(lp.max_violation(s.assignment), 1e-7);
    }
  }
  // Both verdicts should be exercised.
  EXPECT_GT(feasible, 20);
  EXPECT_LT(feasible, 180);
}

TEST(LpOracleTest, OptimumMatchesVertexEnumeration) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    const LpProblem lp = RandomSmallLp(gen, /*with_box=*/true);
    const auto expected = VertexEnumerationOracle(lp);
    const LpSolution s = lp_minimize(lp);
    ASSERT_EQ(s.feasible(), expected.feasible) << "trial " << trial;
    if (s.feasible()) {
      EXPECT_NEAR(s.objective_value, expected.best_objective, 1e-7);
    }
  }
}

TEST(LpPropertyTest, RowScalingKeepsVerdict) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    const LpProblem lp = RandomSmallLp(gen, false);
    LpProblem scaled(lp.num_vars());
    for (const auto& c : lp.constraints()) {
      const double s = scale(gen);
      std::vector<double> a = c.coefficients;
      for (double& x : a) x *= s;
      scaled.add_constraint(a, c.relation, c.rhs * s);
    }
    EXPECT_EQ(lp_feasible(lp).feasible(), lp_feasible(scaled).feasible());
  }
}

TEST(LpPropertyTest, AddingSatisfiedConstraintKeepsFeasible) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    LpProblem lp = RandomSmallLp(gen, false);
    const LpSolution s = lp_feasible(lp);
    if (!s.feasible()) continue;
    std::vector<double> a(lp.num_vars());
    double lhs = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) lhs += (a[j] = coef(gen)) * s.assignment[j];
    lp.add_constraint(a, Relation::kLessEqual, lhs + 0.5);
    EXPECT_TRUE(lp_feasible(lp).feasible());
  }
}

TEST(LpFeasibleTest, IsDeterministic) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const LpProblem lp = RandomSmallLp(gen, true);
    const LpSolution a = lp_minimize(lp);
    const LpSolution b = lp_minimize(lp);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.assignment, b.assignment);
  }
}

}  // namespace
}  // namespace robustdist
