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

// Brute-force LP oracle: enumerate every intersection of num_vars
// hyperplanes drawn from the constraints and the x >= 0 bounds, keep the
// feasible ones. With x >= 0 the feasible region has no lines, so it is
// nonempty iff it has a vertex, and a bounded objective attains its optimum
// at one.

#ifndef ROBUSTDIST_TESTS_LP_ORACLE_H_
#define ROBUSTDIST_TESTS_LP_ORACLE_H_

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "robustdist/lp.h"

namespace robustdist::testing {

struct OracleResult {
  bool feasible = false;
  double best_objective = std::numeric_limits<double>::infinity();
};

// Solves the square system by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> SolveSquare(
    std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Requires default bounds (x >= 0, no upper bounds).
inline OracleResult VertexEnumerationOracle(const LpProblem& problem,
                                            double tol = 1e-9) {
  const int n = problem.num_vars();
  std::vector<std::vector<double>> planes;
  std::vector<double> rhs;
  for (const auto& c : problem.constraints()) {
    planes.push_back(c.coefficients);
    rhs.push_back(c.rhs);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back(e);
    rhs.push_back(0.0);
  }
  const int total = static_cast<int>(planes.size());
  OracleResult out;
  std::vector<int> pick(n);
  // Enumerate n-subsets of the hyperplanes in lexicographic order.
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i : pick) {
      a.push_back(planes[i]);
      b.push_back(rhs[i]);
    }
    if (auto x = SolveSquare(a, b);
        x && problem.max_violation(*x) <= tol) {
      out.feasible = true;
      if (problem.objective()) {
        double value = 0.0;
        for (int j = 0; j < n; ++j) {
          value += problem.objective()->coefficients[j] * (*x)[j];
        }
        out.best_objective = std::min(out.best_objective, value);
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

// Integer data in small ranges so verdicts are not tolerance-sensitive.
inline LpProblem RandomSmallLp(std::mt19937_64& gen, bool with_box) {
  std::uniform_int_distribution<int> vars(1, 4);
  std::uniform_int_distribution<int> rows(1, with_box ? 4 : 8);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rhs(-10, 10);
  std::uniform_int_distribution<int> rel(0, 5);
  const int n = vars(gen);
  LpProblem lp(n);
  const int m = rows(gen);
  for (int r = 0; r < m; ++r) {
    std::vector<double> a(n);
    for (double& x : a) x = coef(gen);
    const int kind = rel(gen);
    const Relation relation = kind < 3   ? Relation::kLessEqual
                              : kind < 5 ? Relation::kGreaterEqual
                                         : Relation::kEqual;
    lp.add_constraint(a, relation, rhs(gen));
  }
  if (with_box) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      lp.add_constraint(e, Relation::kLessEqual, 10.0);
    }
    std::vector<double> c(n);
    for (double& x : c) x = coef(gen);
    lp.set_objective(c);
  }
  return lp;
}

}  // namespace robustdist::testing

#endif  // ROBUSTDIST_TESTS_LP_ORACLE_H_
