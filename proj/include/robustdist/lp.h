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

// Dense two-phase simplex for small linear programs.
//
// Variables default to [0, +inf). Bounds may be any extended interval;
// finite upper bounds become explicit rows. Pricing is Dantzig's rule with a
// switch to Bland's rule after a run of degenerate pivots, so the method
// always terminates and is deterministic for a given input.

#ifndef ROBUSTDIST_LP_H_
#define ROBUSTDIST_LP_H_

#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace robustdist {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

enum class Sense { kMinimize, kMaximize };

struct LinearObjective {
  std::vector<double> coefficients;
  Sense sense = Sense::kMinimize;
};

class LpProblem {
 public:
  explicit LpProblem(int num_vars);

  int num_vars() const { return num_vars_; }

  void add_constraint(std::vector<double> coefficients, Relation relation,
                      double rhs);
  void set_objective(std::vector<double> coefficients,
                     Sense sense = Sense::kMinimize);
  void set_bounds(int var, double lower, double upper);

  const std::vector<LinearConstraint>& constraints() const {
    return constraints_;
  }
  const std::optional<LinearObjective>& objective() const { return objective_; }
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }

  // Largest violation of any constraint or bound at `x` (0 when satisfied).
  double max_violation(std::span<const double> x) const;

 private:
  int num_vars_;
  std::vector<LinearConstraint> constraints_;
  std::optional<LinearObjective> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

enum class LpStatus { kFeasible, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  // Populated for kFeasible.
  std::vector<double> assignment;
  double max_violation = 0.0;
  // Objective at `assignment` (lp_minimize only).
  double objective_value = 0.0;
  int pivots = 0;

  bool feasible() const { return status == LpStatus::kFeasible; }
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double pivot_tol = 1e-10;
  // Degenerate pivots in a row before falling back to Bland's rule.
  int degenerate_run = 50;
  // Prints every tableau when set.
  std::ostream* debug = nullptr;
};

// Finds any point satisfying the constraints within feasibility_tol.
// The objective, if present, is ignored.
LpSolution lp_feasible(const LpProblem& problem, const LpOptions& options = {});

// Optimizes the objective. Throws InvalidArgument when none is set.
LpSolution lp_minimize(const LpProblem& problem, const LpOptions& options = {});

}  // namespace robustdist

#endif  // ROBUSTDIST_LP_H_
