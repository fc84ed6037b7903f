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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "robustdist/core.h"

namespace robustdist {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOptimalityTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

// Original variable x = offset + sign * y[pos] - y[neg] (neg only when free).
struct VariableMap {
  int pos = -1;
  int neg = -1;
  double offset = 0.0;
  double sign = 1.0;
};

struct StandardRow {
  std::vector<double> coefficients;
  Relation relation;
  double rhs;
};

enum class PhaseResult { kOptimal, kUnbounded };

class Tableau {
 public:
  Tableau(const std::vector<StandardRow>& rows, int structural,
          const LpOptions& options)
      : options_(options), structural_(structural) {
    rows_ = static_cast<int>(rows.size());
    int slacks = 0;
    int artificials = 0;
    for (const StandardRow& row : rows) {
      if (row.relation != Relation::kEqual) ++slacks;
      if (row.relation != Relation::kLessEqual) ++artificials;
    }
    first_artificial_ = structural_ + slacks;
    cols_ = first_artificial_ + artificials;
    width_ = cols_ + 1;
    data_.assign(static_cast<std::size_t>(rows_) * width_, 0.0);
    objective_.assign(width_, 0.0);
    costs_.assign(cols_, 0.0);
    basis_.assign(rows_, -1);

    int slack = structural_;
    int artificial = first_artificial_;
    for (int r = 0; r < rows_; ++r) {
      double* row = Row(r);
      std::copy(rows[r].coefficients.begin(), rows[r].coefficients.end(), row);
      row[cols_] = rows[r].rhs;
      switch (rows[r].relation) {
        case Relation::kLessEqual:
          row[slack] = 1.0;
          basis_[r] = slack++;
          break;
        case Relation::kGreaterEqual:
          row[slack++] = -1.0;
          row[artificial] = 1.0;
          basis_[r] = artificial++;
          break;
        case Relation::kEqual:
          row[artificial] = 1.0;
          basis_[r] = artificial++;
          break;
      }
    }
    original_ = data_;
  }

  bool has_artificials() const { return first_artificial_ < cols_; }

  // Minimizes the sum of artificial variables. Returns that minimum.
  double RunPhaseOne() {
    std::fill(costs_.begin(), costs_.end(), 0.0);
    for (int c = first_artificial_; c < cols_; ++c) costs_[c] = 1.0;
    PriceObjective();
    Run(/*allow_artificial=*/true);
    return -objective_[cols_];
  }

  // Pivots zero-valued artificials out of the basis where possible.
  void DriveOutArtificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!IsArtificial(basis_[r])) continue;
      const double* row = Row(r);
      int best = -1;
      double best_abs = 1e-7;
      for (int c = 0; c < first_artificial_; ++c) {
        if (std::abs(row[c]) > best_abs) {
          best_abs = std::abs(row[c]);
          best = c;
        }
      }
      if (best >= 0) Pivot(r, best);
    }
    Reinvert();
  }

  PhaseResult RunPhaseTwo(const std::vector<double>& costs) {
    std::fill(costs_.begin(), costs_.end(), 0.0);
    std::copy(costs.begin(), costs.end(), costs_.begin());
    PriceObjective();
    return Run(/*allow_artificial=*/false);
  }

  std::vector<double> StructuralValues() const {
    std::vector<double> y(structural_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < structural_) y[basis_[r]] = std::max(0.0, Row(r)[cols_]);
    }
    return y;
  }

  int pivots() const { return pivots_; }

 private:
  static constexpr int kReinvertInterval = 40;
  // Harris ratio test: basic values may go this far negative in one step.
  static constexpr double kPrimalTol = 1e-9;

  double* Row(int r) { return data_.data() + static_cast<std::size_t>(r) * width_; }
  const double* Row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * width_;
  }
  bool IsArtificial(int c) const { return c >= first_artificial_; }

  // Objective row = costs minus the basic combination of rows.
  void PriceObjective() {
    std::fill(objective_.begin(), objective_.end(), 0.0);
    std::copy(costs_.begin(), costs_.end(), objective_.begin());
    for (int r = 0; r < rows_; ++r) {
      const double factor = objective_[basis_[r]];
      if (factor == 0.0) continue;
      const double* row = Row(r);
      for (int c = 0; c < width_; ++c) objective_[c] -= factor * row[c];
      objective_[basis_[r]] = 0.0;
    }
  }

  // Rebuilds the tableau for the current basis from the original rows, so
  // rounding error does not accumulate across pivots. Keeps the old tableau
  // if the basis matrix looks singular.
  void Reinvert() {
    std::vector<double> fresh = original_;
    auto row_of = [&](int r) {
      return fresh.data() + static_cast<std::size_t>(r) * width_;
    };
    std::vector<char> assigned(rows_, 0);
    std::vector<int> new_basis(rows_, -1);
    std::vector<int> order = basis_;
    for (int b : order) {
      int best = -1;
      double best_abs = 1e-11;
      for (int r = 0; r < rows_; ++r) {
        if (assigned[r]) continue;
        const double a = std::abs(row_of(r)[b]);
        if (a > best_abs) {
          best_abs = a;
          best = r;
        }
      }
      if (best < 0) return;
      assigned[best] = 1;
      new_basis[best] = b;
      double* prow = row_of(best);
      const double inv = 1.0 / prow[b];
      for (int j = 0; j < width_; ++j) prow[j] *= inv;
      prow[b] = 1.0;
      for (int r = 0; r < rows_; ++r) {
        if (r == best) continue;
        double* other = row_of(r);
        const double factor = other[b];
        if (factor == 0.0) continue;
        for (int j = 0; j < width_; ++j) other[j] -= factor * prow[j];
        other[b] = 0.0;
      }
    }
    data_ = std::move(fresh);
    basis_ = std::move(new_basis);
    for (int r = 0; r < rows_; ++r) {
      double& value = Row(r)[cols_];
      if (value < 0.0 && value > -kPrimalTol) value = 0.0;
    }
    PriceObjective();
  }

  void Pivot(int r, int c) {
    double* row = Row(r);
    const double inv = 1.0 / row[c];
    for (int j = 0; j < width_; ++j) row[j] *= inv;
    row[c] = 1.0;
    basis_[r] = c;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* other = Row(i);
      const double factor = other[c];
      if (factor == 0.0) continue;
      for (int j = 0; j < width_; ++j) other[j] -= factor * row[j];
      other[c] = 0.0;
      if (other[cols_] < 0.0 && other[cols_] > -kDegenerateStep) {
        other[cols_] = 0.0;
      }
    }
    const double factor = objective_[c];
    if (factor != 0.0) {
      for (int j = 0; j < width_; ++j) objective_[j] -= factor * row[j];
      objective_[c] = 0.0;
    }
    ++pivots_;
    if (options_.debug != nullptr) Dump(*options_.debug);
  }

  PhaseResult Run(bool allow_artificial) {
    const int limit_cols = allow_artificial ? cols_ : first_artificial_;
    const long max_pivots = 100000L + 50L * (rows_ + cols_);
    int degenerate = 0;
    int since_reinvert = 0;
    bool verified = false;
    for (long iter = 0;; ++iter) {
      if (iter > max_pivots) {
        throw std::runtime_error("simplex: pivot limit exceeded");
      }
      if (since_reinvert >= kReinvertInterval) {
        Reinvert();
        since_reinvert = 0;
      }
      std::vector<char> is_basic(cols_, 0);
      for (int b : basis_) is_basic[b] = 1;
      const bool bland = degenerate >= options_.degenerate_run;
      int enter = -1;
      double best = -kOptimalityTol;
      for (int c = 0; c < limit_cols; ++c) {
        if (is_basic[c] || objective_[c] >= -kOptimalityTol) continue;
        if (bland) {
          enter = c;
          break;
        }
        if (objective_[c] < best) {
          best = objective_[c];
          enter = c;
        }
      }
      if (enter < 0) {
        // Confirm optimality on a freshly factored tableau.
        if (verified || since_reinvert == 0) return PhaseResult::kOptimal;
        Reinvert();
        since_reinvert = 0;
        verified = true;
        continue;
      }
      verified = false;

      // Harris two-pass ratio test: find the largest step allowed with a
      // small primal tolerance, then take the largest pivot within it.
      double max_step = kInf;
      for (int r = 0; r < rows_; ++r) {
        const double a = Row(r)[enter];
        if (a <= options_.pivot_tol) continue;
        const double value = std::max(0.0, Row(r)[cols_]);
        max_step = std::min(max_step, (value + kPrimalTol) / a);
      }
      if (max_step == kInf) return PhaseResult::kUnbounded;
      int leave = -1;
      double best_pivot = 0.0;
      for (int r = 0; r < rows_; ++r) {
        const double a = Row(r)[enter];
        if (a <= options_.pivot_tol) continue;
        const double value = std::max(0.0, Row(r)[cols_]);
        if (value / a > max_step) continue;
        bool take = false;
        if (leave < 0) {
          take = true;
        } else if (bland) {
          take = basis_[r] < basis_[leave];
        } else {
          take = a > best_pivot;
        }
        if (take) {
          leave = r;
          best_pivot = a;
        }
      }
      const double step = std::max(0.0, Row(leave)[cols_]) / best_pivot;
      degenerate = step <= kDegenerateStep ? degenerate + 1 : 0;
      Pivot(leave, enter);
      ++since_reinvert;
    }
  }

  void Dump(std::ostream& out) const {
    out << "tableau after pivot " << pivots_ << " (" << rows_ << "x" << cols_
        << ")\n";
    for (int r = 0; r < rows_; ++r) {
      out << "  [x" << basis_[r] << "]";
      for (int c = 0; c <= cols_; ++c) out << ' ' << Row(r)[c];
      out << '\n';
    }
    out << "  [obj]";
    for (double v : objective_) out << ' ' << v;
    out << '\n';
  }

  const LpOptions& options_;
  int structural_;
  int rows_ = 0;
  int first_artificial_ = 0;
  int cols_ = 0;
  int width_ = 0;
  std::vector<double> data_;
  std::vector<double> original_;
  std::vector<double> objective_;
  std::vector<double> costs_;
  std::vector<int> basis_;
  int pivots_ = 0;
};

struct Standardized {
  std::vector<VariableMap> vars;
  int structural = 0;
  std::vector<StandardRow> rows;
  bool trivially_infeasible = false;
};

Standardized Standardize(const LpProblem& problem, double feasibility_tol) {
  Standardized out;
  const int n = problem.num_vars();
  out.vars.resize(n);
  std::vector<std::pair<int, double>> upper_rows;  // (column, bound)
  for (int j = 0; j < n; ++j) {
    const double lo = problem.lower(j);
    const double hi = problem.upper(j);
    VariableMap& v = out.vars[j];
    if (std::isfinite(lo)) {
      v.pos = out.structural++;
      v.offset = lo;
      if (std::isfinite(hi)) upper_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.pos = out.structural++;
      v.offset = hi;
      v.sign = -1.0;
    } else {
      v.pos = out.structural++;
      v.neg = out.structural++;
    }
  }

  auto push = [&](std::vector<double> coeffs, Relation rel, double rhs) {
    double scale = 0.0;
    for (double a : coeffs) scale = std::max(scale, std::abs(a));
    if (scale == 0.0) {
      const bool ok = (rel == Relation::kLessEqual && rhs >= -feasibility_tol) ||
                      (rel == Relation::kGreaterEqual && rhs <= feasibility_tol) ||
                      (rel == Relation::kEqual && std::abs(rhs) <= feasibility_tol);
      if (!ok) out.trivially_infeasible = true;
      return;
    }
    for (double& a : coeffs) a /= scale;
    rhs /= scale;
    if (rhs < 0.0) {
      for (double& a : coeffs) a = -a;
      rhs = -rhs;
      if (rel == Relation::kLessEqual) {
        rel = Relation::kGreaterEqual;
      } else if (rel == Relation::kGreaterEqual) {
        rel = Relation::kLessEqual;
      }
    }
    out.rows.push_back({std::move(coeffs), rel, rhs});
  };

  for (const LinearConstraint& c : problem.constraints()) {
    std::vector<double> coeffs(out.structural, 0.0);
    double rhs = c.rhs;
    for (int j = 0; j < n; ++j) {
      const double a = c.coefficients[j];
      if (a == 0.0) continue;
      const VariableMap& v = out.vars[j];
      coeffs[v.pos] += a * v.sign;
      if (v.neg >= 0) coeffs[v.neg] -= a;
      rhs -= a * v.offset;
    }
    push(std::move(coeffs), c.relation, rhs);
  }
  for (const auto& [col, bound] : upper_rows) {
    std::vector<double> coeffs(out.structural, 0.0);
    coeffs[col] = 1.0;
    push(std::move(coeffs), Relation::kLessEqual, bound);
  }
  return out;
}

std::vector<double> Recover(const Standardized& s, const std::vector<double>& y) {
  std::vector<double> x(s.vars.size());
  for (std::size_t j = 0; j < s.vars.size(); ++j) {
    const VariableMap& v = s.vars[j];
    x[j] = v.offset + v.sign * y[v.pos] - (v.neg >= 0 ? y[v.neg] : 0.0);
  }
  return x;
}

LpSolution Solve(const LpProblem& problem, const LpOptions& options,
                 bool optimize) {
  LpSolution result;
  const Standardized s = Standardize(problem, options.feasibility_tol);
  if (s.trivially_infeasible) return result;

  Tableau tableau(s.rows, s.structural, options);
  if (tableau.has_artificials()) {
    tableau.RunPhaseOne();
    tableau.DriveOutArtificials();
  }
  std::vector<double> x = Recover(s, tableau.StructuralValues());
  result.max_violation = problem.max_violation(x);
  result.pivots = tableau.pivots();
  if (result.max_violation > options.feasibility_tol) return result;

  if (optimize) {
    const LinearObjective& obj = *problem.objective();
    const double sense = obj.sense == Sense::kMinimize ? 1.0 : -1.0;
    std::vector<double> costs(s.structural, 0.0);
    for (int j = 0; j < problem.num_vars(); ++j) {
      const VariableMap& v = s.vars[j];
      costs[v.pos] += sense * obj.coefficients[j] * v.sign;
      if (v.neg >= 0) costs[v.neg] -= sense * obj.coefficients[j];
    }
    if (tableau.RunPhaseTwo(costs) == PhaseResult::kUnbounded) {
      result.status = LpStatus::kUnbounded;
      result.pivots = tableau.pivots();
      return result;
    }
    x = Recover(s, tableau.StructuralValues());
    result.max_violation = problem.max_violation(x);
    result.pivots = tableau.pivots();
    double value = 0.0;
    for (int j = 0; j < problem.num_vars(); ++j) {
      value += obj.coefficients[j] * x[j];
    }
    result.objective_value = value;
  }
  result.status = LpStatus::kFeasible;
  result.assignment = std::move(x);
  return result;
}

}  // namespace

LpProblem::LpProblem(int num_vars)
    : num_vars_(num_vars), lower_(num_vars, 0.0), upper_(num_vars, kInf) {
  if (num_vars < 1) throw InvalidArgument("LpProblem: need at least one variable");
}

void LpProblem::add_constraint(std::vector<double> coefficients,
                               Relation relation, double rhs) {
  if (static_cast<int>(coefficients.size()) != num_vars_) {
    throw InvalidArgument("constraint has " +
                          std::to_string(coefficients.size()) +
                          " coefficients, expected " + std::to_string(num_vars_));
  }
  if (!std::isfinite(rhs)) throw InvalidArgument("constraint rhs must be finite");
  for (double a : coefficients) {
    if (!std::isfinite(a)) throw InvalidArgument("non-finite coefficient");
  }
  constraints_.push_back({std::move(coefficients), relation, rhs});
}

void LpProblem::set_objective(std::vector<double> coefficients, Sense sense) {
  if (static_cast<int>(coefficients.size()) != num_vars_) {
    throw InvalidArgument("objective length does not match num_vars");
  }
  objective_ = LinearObjective{std::move(coefficients), sense};
}

void LpProblem::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= num_vars_) throw InvalidArgument("bad variable index");
  if (std::isnan(lower) || std::isnan(upper) || lower == kInf ||
      upper == -kInf) {
    throw InvalidArgument("invalid variable bounds");
  }
  lower_[var] = lower;
  upper_[var] = upper;
}

double LpProblem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars_; ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (const LinearConstraint& c : constraints_) {
    double lhs = 0.0;
    for (int j = 0; j < num_vars_; ++j) lhs += c.coefficients[j] * x[j];
    switch (c.relation) {
      case Relation::kLessEqual:
        worst = std::max(worst, lhs - c.rhs);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, c.rhs - lhs);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(lhs - c.rhs));
        break;
    }
  }
  return worst;
}

LpSolution lp_feasible(const LpProblem& problem, const LpOptions& options) {
  return Solve(problem, options, /*optimize=*/false);
}

LpSolution lp_minimize(const LpProblem& problem, const LpOptions& options) {
  if (!problem.objective()) {
    throw InvalidArgument("lp_minimize: problem has no objective");
  }
  return Solve(problem, options, /*optimize=*/true);
}

}  // namespace robustdist
