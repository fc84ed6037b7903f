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

#include "robustdist/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "robustdist/batch_io.h"
#include "robustdist/core.h"
#include "robustdist/rng.h"

namespace robustdist {
namespace {

using Clock = std::chrono::steady_clock;

// Running minimum of margins with the point that produced it.
class MarginTracker {
 public:
  explicit MarginTracker(std::string id) { report_.lemma_id = std::move(id); }

  void Add(double margin, const std::function<std::string()>& point) {
    ++report_.grid_size;
    if (first_ || margin < report_.worst_margin) {
      report_.worst_margin = margin;
      report_.worst_point = point();
      first_ = false;
    }
  }

  // Merges another report's worst point, counting its grid.
  void Merge(const LemmaCheckReport& other) {
    const std::size_t before = report_.grid_size;
    Add(other.worst_margin, [&] { return other.worst_point; });
    report_.grid_size = before + other.grid_size;
  }

  LemmaCheckReport Finish() {
    report_.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return report_;
  }

 private:
  LemmaCheckReport report_;
  bool first_ = true;
  Clock::time_point start_ = Clock::now();
};

std::string Point(std::initializer_list<std::pair<const char*, double>> coords) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, value] : coords) {
    if (!first) out << ' ';
    out << name << '=' << format_real(value);
    first = false;
  }
  return out.str();
}

void RequireEps(double eps, double upper, const char* what) {
  if (!(eps > 0.0 && eps < upper)) {
    throw InvalidArgument(std::string(what) + ": eps out of range");
  }
}

double TvCounts(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) total += std::abs(a[t] - b[t]);
  return total / 2;
}

// Count law of a mixture of B(k, theta_j).
std::vector<double> MixtureCounts(int k, std::span<const double> thetas,
                                  std::span<const double> weights) {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const CountDistribution b = binomial_pmf(k, thetas[j]);
    for (int t = 0; t <= k; ++t) out[t] += weights[j] * b[t];
  }
  return out;
}

}  // namespace

double tv_binomial(int k, double theta1, double theta2) {
  return tv_distance(binomial_pmf(k, theta1), binomial_pmf(k, theta2));
}

double kl_bernoulli(double eps) {
  RequireEps(eps, 0.5, "kl_bernoulli");
  return eps * std::log((1 + eps) / (1 - eps));
}

LemmaCheckReport check_tensorization_upper(int k, double eps) {
  RequireEps(eps, 0.5, "check_tensorization_upper");
  if (k < 1) throw InvalidArgument("check_tensorization_upper: k < 1");
  MarginTracker tracker("tensorization_upper");
  const double lo = (1 - eps) / 2;
  const double hi = (1 + eps) / 2;
  const double exact = tv_binomial(k, lo, hi);
  const double pinsker = std::sqrt(k * kl_bernoulli(eps) / 2);
  const double bound = eps * std::sqrt(2.0 * k);
  auto point = [&] { return Point({{"k", k}, {"eps", eps}}); };
  tracker.Add(bound - exact, point);
  tracker.Add(pinsker - exact, point);
  tracker.Add(bound - pinsker, point);
  tracker.Add(-std::abs(tv_binomial(1, lo, hi) - eps), point);
  LemmaCheckReport report = tracker.Finish();
  report.grid_size = 1;
  return report;
}

LemmaCheckReport check_tensorization_lower(int k, double eps) {
  if (k < 1) throw InvalidArgument("check_tensorization_lower: k < 1");
  const double root_k = std::sqrt(static_cast<double>(k));
  RequireEps(eps, 1 / (15 * root_k), "check_tensorization_lower");
  MarginTracker tracker("tensorization_lower");
  const double exact = tv_binomial(k, (1 - eps) / 2, (1 + eps) / 2);
  tracker.Add(exact - eps * root_k / 15,
              [&] { return Point({{"k", k}, {"eps", eps}}); });
  return tracker.Finish();
}

LemmaCheckReport check_mixture_separation(int k, double p_hi, double q_lo,
                                          double eps, std::uint64_t seed,
                                          int random_mixtures) {
  if (k < 1) throw InvalidArgument("check_mixture_separation: k < 1");
  const double root_k = std::sqrt(static_cast<double>(k));
  RequireEps(eps, 1 / (15 * root_k), "check_mixture_separation");
  if (!(p_hi >= 0.0 && q_lo <= 1.0 && q_lo - p_hi >= eps - 1e-15)) {
    throw InvalidArgument("check_mixture_separation: need q_lo - p_hi >= eps");
  }
  MarginTracker tracker("mixture_separation");
  const double target = eps * root_k / 15;
  auto point = [&] {
    return Point({{"k", k}, {"p_hi", p_hi}, {"q_lo", q_lo}, {"eps", eps}});
  };

  if (k < 10) {
    // Mean counts differ by at least k*eps, so TV >= eps.
    tracker.Add(eps - target, point);
  } else {
    // Reflect so that the low side sits below 1/2; the witness is the
    // probability of at most t successes, which is decreasing in theta.
    double lo = p_hi;
    if (p_hi > 0.5) lo = 1 - q_lo;
    const int t = static_cast<int>(std::floor(lo * (k - 1)));
    const double f_lo = binomial_pmf(k, lo).cdf(t);
    const double f_hi = binomial_pmf(k, std::min(lo + eps, 1.0)).cdf(t);
    tracker.Add(f_lo - f_hi - target, point);
  }

  Rng rng(seed);
  std::vector<double> low_thetas(5);
  std::vector<double> high_thetas(5);
  for (int j = 0; j < 5; ++j) {
    low_thetas[j] = p_hi * j / 4;
    high_thetas[j] = q_lo + (1 - q_lo) * j / 4;
  }
  auto random_weights = [&] {
    std::vector<double> w(5);
    double total = 0.0;
    for (double& x : w) total += (x = -std::log(1 - rng.uniform()));
    for (double& x : w) x /= total;
    return w;
  };
  for (int r = 0; r < random_mixtures; ++r) {
    const std::vector<double> wp = random_weights();
    const std::vector<double> wq = random_weights();
    const double tv = TvCounts(MixtureCounts(k, low_thetas, wp),
                               MixtureCounts(k, high_thetas, wq));
    tracker.Add(tv - target, [&] {
      return point() + " mixture=" + std::to_string(r);
    });
  }
  return tracker.Finish();
}

LemmaCheckReport sweep_tensorization_upper(bool dense) {
  MarginTracker tracker("tensorization_upper");
  const int max_k = dense ? 400 : 200;
  const double step = dense ? 0.005 : 0.01;
  for (int k = 1; k <= max_k; ++k) {
    for (int i = 1; i * step <= 0.45 + 1e-12; ++i) {
      tracker.Merge(check_tensorization_upper(k, i * step));
    }
  }
  return tracker.Finish();
}

LemmaCheckReport sweep_tensorization_lower(bool dense) {
  MarginTracker tracker("tensorization_lower");
  const int max_k = dense ? 400 : 200;
  const std::vector<double> fractions =
      dense ? std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9, 0.99}
            : std::vector<double>{0.1, 0.5, 0.9};
  for (int k = 1; k <= max_k; ++k) {
    for (double f : fractions) {
      tracker.Merge(check_tensorization_lower(k, f / (15 * std::sqrt(k))));
    }
  }
  return tracker.Finish();
}

LemmaCheckReport sweep_mixture_separation(bool dense) {
  MarginTracker tracker("mixture_separation");
  const int max_k = dense ? 300 : 150;
  const int k_step = dense ? 1 : 3;
  const double p_step = dense ? 0.025 : 0.05;
  std::uint64_t seed = 0;
  for (int k = 1; k <= max_k; k += k_step) {
    const double eps = 0.9 / (15 * std::sqrt(k));
    for (int i = 0; i * p_step + eps <= 1.0; ++i) {
      const double p_hi = i * p_step;
      tracker.Merge(check_mixture_separation(k, p_hi, p_hi + eps, eps,
                                             derive_seed(17, seed++),
                                             dense ? 20 : 5));
    }
  }
  return tracker.Finish();
}

double product_floor_value(int n, int m, double alpha) {
  return std::pow(1 + alpha / n, n) * std::pow(1 - alpha / m, m);
}

double binomial_mode_value(int k, int t) {
  if (k < 1 || t < 0 || t > k) throw InvalidArgument("binomial_mode_value");
  double log_value =
      std::lgamma(k + 1.0) - std::lgamma(t + 1.0) - std::lgamma(k - t + 1.0);
  if (t > 0) log_value += t * std::log(static_cast<double>(t) / k);
  if (t < k) log_value += (k - t) * std::log(static_cast<double>(k - t) / k);
  return std::exp(log_value);
}

LemmaCheckReport check_power_bernoulli(bool dense) {
  MarginTracker tracker("power_bernoulli");
  const int steps = dense ? 500 : 50;
  for (int i = 0; i <= steps; ++i) {
    const double eps = 0.5 * i / steps;
    for (int j = 0; j <= 2 * steps; ++j) {
      const double a = static_cast<double>(j) / (2 * steps);
      tracker.Add(std::pow(1 - eps, a) - (1 - 2 * a * eps),
                  [&] { return Point({{"eps", eps}, {"alpha", a}}); });
    }
  }
  return tracker.Finish();
}

LemmaCheckReport check_power_monotone(bool dense) {
  MarginTracker tracker("power_monotone");
  const int samples = dense ? 10000 : 1000;
  for (double a : {0.5, 1.0, 2.0}) {
    auto g = [a](double x) { return std::pow(1 - a / x, x); };
    // x from just above a out to 51a.
    double prev_x = a * (1 + 50.0 / samples);
    double prev = g(prev_x);
    for (int j = 2; j <= samples; ++j) {
      const double x = a * (1 + 50.0 * j / samples);
      const double value = g(x);
      tracker.Add(value - prev, [&] {
        return Point({{"a", a}, {"x0", prev_x}, {"x1", x}});
      });
      prev = value;
      prev_x = x;
    }
  }
  return tracker.Finish();
}

LemmaCheckReport check_product_floor(bool dense) {
  MarginTracker tracker("product_floor");
  const int alpha_steps = dense ? 100 : 20;
  for (int n = 1; n <= 50; ++n) {
    const double alpha_max = 1.1 * std::sqrt(static_cast<double>(n));
    for (int m = std::max(n, 2); m <= 100; ++m) {
      for (int j = 0; j <= alpha_steps; ++j) {
        const double a = alpha_max * j / alpha_steps;
        tracker.Add(product_floor_value(n, m, a) - 1.0 / 7, [&] {
          return Point({{"n", n}, {"m", m}, {"alpha", a}});
        });
      }
    }
  }
  return tracker.Finish();
}

LemmaCheckReport check_binomial_mode(bool dense) {
  MarginTracker tracker("binomial_mode");
  const int max_k = dense ? 1000 : 300;
  for (int k = 2; k <= max_k; ++k) {
    for (int t = 1; t < k; ++t) {
      tracker.Add(binomial_mode_value(k, t) - 1 / (3 * std::sqrt(t)),
                  [&] { return Point({{"k", k}, {"t", t}}); });
    }
  }
  return tracker.Finish();
}

std::vector<LemmaCheckReport> check_scalar_inequalities(bool dense) {
  return {check_power_bernoulli(dense), check_power_monotone(dense),
          check_product_floor(dense), check_binomial_mode(dense)};
}

std::vector<std::string> lemma_ids() {
  return {"power_bernoulli",     "power_monotone",      "product_floor",
          "binomial_mode",       "tensorization_upper", "tensorization_lower",
          "mixture_separation"};
}

LemmaCheckReport run_lemma(std::string_view id, bool dense) {
  if (id == "power_bernoulli") return check_power_bernoulli(dense);
  if (id == "power_monotone") return check_power_monotone(dense);
  if (id == "product_floor") return check_product_floor(dense);
  if (id == "binomial_mode") return check_binomial_mode(dense);
  if (id == "tensorization_upper") return sweep_tensorization_upper(dense);
  if (id == "tensorization_lower") return sweep_tensorization_lower(dense);
  if (id == "mixture_separation") return sweep_mixture_separation(dense);
  throw InvalidArgument("unknown lemma id: " + std::string(id));
}

std::vector<LemmaCheckReport> run_lemma_suite(bool dense) {
  std::vector<LemmaCheckReport> out;
  for (const std::string& id : lemma_ids()) out.push_back(run_lemma(id, dense));
  return out;
}

void write_lemma_reports(std::ostream& out,
                         std::span<const LemmaCheckReport> reports) {
  out << "lemma_id,grid_size,worst_margin,worst_point,wall_ms\n";
  for (const LemmaCheckReport& r : reports) {
    out << r.lemma_id << ',' << r.grid_size << ',' << format_real(r.worst_margin)
        << ',' << r.worst_point << ',' << format_real(r.wall_ms) << '\n';
  }
}

}  // namespace robustdist
