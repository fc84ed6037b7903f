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

#include "robustdist/subset_lp.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "parallel.h"
#include "robustdist/batch_io.h"

namespace robustdist {
namespace {

constexpr double kGridSlack = 1e-9;

// Subset masses q(S) for every mask over n elements.
std::vector<double> subset_sums(std::span<const double> q) {
  const std::uint64_t total = std::uint64_t{1} << q.size();
  std::vector<double> sums(total, 0.0);
  for (std::uint64_t s = 1; s < total; ++s) {
    sums[s] = sums[s & (s - 1)] + q[std::countr_zero(s)];
  }
  return sums;
}

std::vector<double> project_to_simplex(std::vector<double> q) {
  double total = 0.0;
  for (double& v : q) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total <= 0.0) return std::vector<double>(q.size(), 1.0 / q.size());
  for (double& v : q) v /= total;
  return q;
}

}  // namespace

BinomialEstParams::BinomialEstParams(double eps, double eta, int k)
    : eps_(eps), eta_(eta), k_(k) {
  if (!(eps > 0.0 && eps < 1.0 / 15.0)) {
    throw InvalidArgument("eps must lie in (0, 1/15), got " +
                          std::to_string(eps));
  }
  if (!(eta > 0.0 && eta <= 0.125)) {
    throw InvalidArgument("eta must lie in (0, 1/8], got " +
                          std::to_string(eta));
  }
  if (k < 1) throw InvalidArgument("k must be at least 1");
  tot_ = std::max(1, static_cast<int>(std::ceil(4.0 * eta * k / eps - kGridSlack)));
  max_window_ = static_cast<int>(std::floor(1.0 / eta + kGridSlack)) - 4;
}

double BinomialEstParams::subset_radius() const {
  return 3.0 * eta_ + 60.0 * eps_ / std::sqrt(static_cast<double>(k_));
}

bool BinomialEstParams::within_proved_range() const {
  return eps_ <= 1.0 / 900.0;
}

int count_in_subset(std::span<const int> batch, std::uint64_t subset) {
  int count = 0;
  for (int x : batch) count += static_cast<int>((subset >> x) & 1u);
  return count;
}

CountDistribution empirical_count_distribution(const BatchSet& batches,
                                               std::uint64_t subset) {
  if (batches.empty()) throw InvalidArgument("need at least one batch");
  const int k = batches.k();
  std::vector<std::size_t> tally(static_cast<std::size_t>(k) + 1, 0);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    ++tally[static_cast<std::size_t>(count_in_subset(batches[b], subset))];
  }
  std::vector<double> weights(tally.size());
  const double m = static_cast<double>(batches.size());
  for (std::size_t t = 0; t < tally.size(); ++t) weights[t] = tally[t] / m;
  return CountDistribution(std::move(weights));
}

LpProblem window_program(const CountDistribution& f,
                         const BinomialEstParams& params, int window) {
  const int k = params.k();
  if (f.k() != k) throw InvalidArgument("count distribution has the wrong k");
  if (window < 0 || window > params.max_window()) {
    throw InvalidArgument("window out of range");
  }
  const int tot = params.tot();
  const int num_alpha = tot + 1;
  const int num_vars = num_alpha + k + 1;

  std::vector<CountDistribution> components;
  components.reserve(static_cast<std::size_t>(num_alpha));
  for (int j = 0; j <= tot; ++j) {
    const double theta =
        window * params.eta() + j * params.eps() / static_cast<double>(k);
    components.push_back(binomial_pmf(k, std::min(theta, 1.0)));
  }

  LpProblem lp(num_vars);
  for (int t = 0; t <= k; ++t) {
    std::vector<double> upper(static_cast<std::size_t>(num_vars), 0.0);
    for (int j = 0; j < num_alpha; ++j) upper[j] = components[j][t];
    upper[num_alpha + t] = -1.0;
    std::vector<double> lower = upper;
    for (int j = 0; j < num_alpha; ++j) lower[j] = -lower[j];
    lp.add_constraint(std::move(upper), Relation::kLessEqual, f[t]);
    lp.add_constraint(std::move(lower), Relation::kLessEqual, -f[t]);
  }
  std::vector<double> slack_sum(static_cast<std::size_t>(num_vars), 0.0);
  std::fill(slack_sum.begin() + num_alpha, slack_sum.end(), 1.0);
  lp.add_constraint(std::move(slack_sum), Relation::kLessEqual,
                    4.0 * params.eps());
  std::vector<double> alpha_sum(static_cast<std::size_t>(num_vars), 0.0);
  std::fill(alpha_sum.begin(), alpha_sum.begin() + num_alpha, 1.0);
  lp.add_constraint(std::move(alpha_sum), Relation::kEqual, 1.0);
  return lp;
}

SubsetEstimate binomial_est(const CountDistribution& f,
                            const BinomialEstParams& params,
                            const LpOptions& lp_options) {
  SubsetEstimate result;
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i <= params.max_window(); ++i) {
    if (lp_feasible(window_program(f, params, i), lp_options).feasible()) {
      result.window = i;
      result.estimate = (i + 2) * params.eta();
      break;
    }
  }
  result.lp_solve_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

SubsetEstimate binomial_est(const BatchSet& batches, std::uint64_t subset,
                            const BinomialEstParams& params,
                            const LpOptions& lp_options) {
  if (batches.k() != params.k()) {
    throw InvalidArgument("batch size does not match params.k");
  }
  SubsetEstimate result = binomial_est(
      empirical_count_distribution(batches, subset), params, lp_options);
  result.subset = subset;
  return result;
}

SubsetLpResult solve_consistency_program(int n,
                                         std::span<const SubsetEstimate> estimates,
                                         double radius,
                                         const LpOptions& lp_options) {
  if (n < 1 || n > 62) throw InvalidArgument("n must lie in [1, 62]");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  std::vector<std::pair<std::uint64_t, double>> targets;
  SubsetLpResult result{Distribution::Uniform(n), false, 0.0, true, radius,
                        0.0, {}, {}, {}};
  for (const SubsetEstimate& e : estimates) {
    if (e.subset > full) throw InvalidArgument("subset mask exceeds n");
    if (e.estimate) {
      targets.emplace_back(e.subset, *e.estimate);
    } else {
      result.failed_subsets.push_back(e.subset);
    }
  }

  // Variables q_0..q_{n-1}, then the deviation bound r.
  const int r_var = n;
  LpProblem lp(n + 1);
  std::vector<double> simplex(static_cast<std::size_t>(n) + 1, 1.0);
  simplex[r_var] = 0.0;
  lp.add_constraint(std::move(simplex), Relation::kEqual, 1.0);
  std::vector<double> objective(static_cast<std::size_t>(n) + 1, 0.0);
  objective[r_var] = 1.0;
  lp.set_objective(std::move(objective));

  std::vector<bool> active(targets.size(), false);
  auto activate = [&](std::size_t idx) {
    active[idx] = true;
    const auto [mask, value] = targets[idx];
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    for (int e = 0; e < n; ++e) row[e] = static_cast<double>((mask >> e) & 1u);
    row[r_var] = -1.0;
    std::vector<double> neg = row;
    for (int e = 0; e < n; ++e) neg[e] = -neg[e];
    lp.add_constraint(std::move(row), Relation::kLessEqual, value);
    lp.add_constraint(std::move(neg), Relation::kLessEqual, -value);
  };
  // Start from every constraint when there are few, otherwise from the
  // singletons and their complements; add violated subsets until none remain.
  for (std::size_t idx = 0; idx < targets.size(); ++idx) {
    const std::uint64_t mask = targets[idx].first;
    if (targets.size() <= 64 || std::popcount(mask) <= 1 ||
        std::popcount(mask) >= n - 1) {
      activate(idx);
    }
  }

  std::vector<double> q(static_cast<std::size_t>(n), 1.0 / n);
  double bound = 0.0;
  for (;;) {
    const LpSolution solution = lp_minimize(lp, lp_options);
    if (!solution.feasible()) {
      throw std::runtime_error("consistency program failed to solve");
    }
    q = project_to_simplex(std::vector<double>(
        solution.assignment.begin(), solution.assignment.begin() + n));
    bound = solution.assignment[r_var];
    const std::vector<double> sums = subset_sums(q);
    std::vector<std::pair<double, std::size_t>> violated;
    for (std::size_t idx = 0; idx < targets.size(); ++idx) {
      if (active[idx]) continue;
      const double dev =
          std::abs(sums[targets[idx].first] - targets[idx].second);
      if (dev > bound + 1e-9) violated.emplace_back(dev, idx);
    }
    if (violated.empty()) break;
    const std::size_t take =
        std::min(violated.size(), static_cast<std::size_t>(2 * n));
    std::partial_sort(violated.begin(), violated.begin() + take, violated.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first ||
                               (a.first == b.first && a.second < b.second);
                      });
    for (std::size_t v = 0; v < take; ++v) activate(violated[v].second);
  }

  result.q = Distribution(q);
  const std::vector<double> sums = subset_sums(q);
  for (const auto& [mask, value] : targets) {
    const double dev = std::abs(sums[mask] - value);
    result.max_deviation = std::max(result.max_deviation, dev);
    if (dev > radius + lp_options.feasibility_tol) {
      result.conflicting_subsets.push_back(mask);
    }
  }
  result.degraded =
      !result.failed_subsets.empty() || !result.conflicting_subsets.empty();
  return result;
}

SubsetLpResult learn_subset_lp(const BatchSet& batches, double eps, double eta,
                               double delta, const SubsetLpOptions& options) {
  const int n = batches.n();
  const int k = batches.k();
  if (n > options.max_n) {
    throw InvalidArgument("n = " + std::to_string(n) +
                          " exceeds the subset enumeration cap " +
                          std::to_string(options.max_n));
  }
  if (batches.empty()) throw InvalidArgument("need at least one batch");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (eta < 0.0) throw InvalidArgument("eta must be nonnegative");
  const double effective_eta =
      eta == 0.0 ? eps / std::sqrt(static_cast<double>(k)) : eta;
  const BinomialEstParams params(eps, effective_eta, k);

  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t full = total - 1;
  std::vector<SubsetEstimate> estimates(total);
  estimates[0] = SubsetEstimate{.subset = 0, .estimate = 0.0};
  estimates[full] = SubsetEstimate{.subset = full, .estimate = 1.0};
  if (total > 2) {
    internal::parallel_for(total - 2, [&](std::size_t idx) {
      const std::uint64_t mask = idx + 1;
      estimates[mask] = binomial_est(batches, mask, params, options.lp);
    });
  }

  SubsetLpResult result = solve_consistency_program(
      n, estimates, params.subset_radius(), options.lp);
  result.eta = effective_eta;
  result.within_proved_range = params.within_proved_range();
  result.estimates = std::move(estimates);
  return result;
}

void write_subset_estimates(const std::filesystem::path& path,
                            std::span<const SubsetEstimate> estimates) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "subset_bitmask,estimate,feasible_i,lp_solve_ms\n";
  for (const SubsetEstimate& e : estimates) {
    out << e.subset << ','
        << (e.estimate ? format_real(*e.estimate) : std::string("failed"))
        << ',' << e.window << ',' << format_real(e.lp_solve_ms) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace robustdist
