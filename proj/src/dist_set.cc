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

#include "robustdist/dist_set.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

#include "parallel.h"
#include "robustdist/batch_io.h"

namespace robustdist {
namespace {

constexpr double kDedupTolerance = 1e-12;

// First-coordinate marginal without validation; the caller decides whether
// to renormalize.
std::vector<double> raw_marginal(const Tensor& a) {
  const std::size_t block = a.size() / a.n();
  std::vector<double> out(static_cast<std::size_t>(a.n()), 0.0);
  for (std::size_t f = 0; f < a.size(); ++f) out[f / block] += a[f];
  return out;
}

class Collector {
 public:
  explicit Collector(CandidateSet& out) : out_(out) {}

  void Add(std::vector<double> probs, std::string origin) {
    ++out_.raw_count;
    double total = 0.0;
    for (double& x : probs) {
      if (x < 0.0 && x > -kProbSumTolerance) x = 0.0;
      total += x;
    }
    if (std::abs(total - 1.0) > kProbSumTolerance) {
      for (double& x : probs) x /= total;
      out_.renormalized = true;
    }
    for (const Distribution& c : out_.candidates) {
      bool same = true;
      for (std::size_t e = 0; e < probs.size() && same; ++e) {
        same = std::abs(c[static_cast<int>(e)] - probs[e]) <= kDedupTolerance;
      }
      if (same) return;
    }
    out_.candidates.emplace_back(std::move(probs));
    out_.origins.push_back(std::move(origin));
  }

  void Recurse(const Tensor& a, const std::string& prefix) {
    if (a.k() == 1) {
      Add(a.entries(), prefix + "leaf");
      return;
    }
    for (int i = 0; i < a.n(); ++i) {
      Slice s = slice(a, i);
      if (!s.normalized) {
        ++out_.skipped_slices;
        continue;
      }
      Recurse(*s.normalized, prefix + "s" + std::to_string(i + 1) + "/");
    }
    Add(raw_marginal(a), prefix + "marginal");
  }

 private:
  CandidateSet& out_;
};

}  // namespace

CandidateSet dist_set(const Tensor& a) {
  if (!a.is_probability(kProbSumTolerance)) {
    throw InvalidArgument("dist_set: input is not a probability tensor");
  }
  CandidateSet out;
  Collector(out).Recurse(a, "");
  return out;
}

TensorFit dist_set_tensor_input(const Tensor& a, std::size_t cap) {
  TensorFit fit{dist_set(a), {}, 0, Distribution::Uniform(a.n()), 0.0};
  const std::size_t count = fit.set.candidates.size();
  fit.objectives.assign(count, 0.0);
  internal::parallel_for(count, [&](std::size_t c) {
    fit.objectives[c] =
        tv_distance(a, tensor_power(fit.set.candidates[c], a.k(), cap));
  });
  fit.best = static_cast<std::size_t>(
      std::min_element(fit.objectives.begin(), fit.objectives.end()) -
      fit.objectives.begin());
  fit.q0 = fit.set.candidates[fit.best];
  fit.objective = fit.objectives[fit.best];
  return fit;
}

TensorFit learn_tensor(const BatchSet& batches, std::size_t cap) {
  if (batches.empty()) throw InvalidArgument("learn_tensor: no batches");
  return dist_set_tensor_input(frequency_tensor(batches, cap), cap);
}

void write_candidates(const std::filesystem::path& path, const TensorFit& fit,
                      const std::optional<Distribution>& truth) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "candidate_index,origin_path,l1_objective,tv_to_truth_if_known\n";
  for (std::size_t c = 0; c < fit.set.candidates.size(); ++c) {
    out << c + 1 << ',' << fit.set.origins[c] << ','
        << format_real(fit.objectives[c]) << ',';
    if (truth) out << format_real(tv_distance(fit.set.candidates[c], *truth));
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace robustdist
