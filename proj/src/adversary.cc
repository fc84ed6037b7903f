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

#include "robustdist/adversary.h"

#include <algorithm>
#include <cmath>

#include "robustdist/batch_io.h"

namespace robustdist {
namespace {

void DrawBatch(const CategoricalSampler& sampler, Rng& rng,
               std::vector<int>& batch) {
  for (int& x : batch) x = sampler(rng);
}

// Draws `count` batches from an arbitrary n^k probability tensor.
BatchSet SampleFromTensor(const Tensor& t, std::size_t count, Rng& rng) {
  std::vector<double> weights(t.entries());
  for (double& w : weights) w = std::max(w, 0.0);
  const CategoricalSampler sampler(weights);
  BatchSet out(t.n(), t.k());
  out.reserve(count);
  std::vector<int> batch(t.k());
  for (std::size_t b = 0; b < count; ++b) {
    std::size_t flat = static_cast<std::size_t>(sampler(rng));
    for (int j = t.k() - 1; j >= 0; --j) {
      batch[j] = static_cast<int>(flat % t.n());
      flat /= t.n();
    }
    out.push_back(batch);
  }
  return out;
}

std::vector<double> ParseList(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    out.push_back(parse_real(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

Distribution shift_mass(const Distribution& p, int donor, int receiver,
                        double amount) {
  if (donor < 0 || donor >= p.n() || receiver < 0 || receiver >= p.n() ||
      donor == receiver) {
    throw InvalidArgument("shift_mass: invalid donor/receiver pair");
  }
  if (p[donor] < amount) {
    throw InvalidArgument("shift_mass: donor " + std::to_string(donor + 1) +
                          " holds " + std::to_string(p[donor]) +
                          " < eta = " + std::to_string(amount));
  }
  std::vector<double> v = p.probs();
  v[donor] -= amount;
  v[receiver] += amount;
  return Distribution(std::move(v));
}

Distribution draw_batch_distribution(const GoodBatchSpec& spec, Rng& rng) {
  if (spec.eta == 0.0 || spec.perturbation == Perturbation::kNone) {
    return spec.target;
  }
  if (spec.perturbation == Perturbation::kFixedShift) {
    return shift_mass(spec.target, spec.donor, spec.receiver, spec.eta);
  }
  const Distribution& p = spec.target;
  if (p.n() < 2) {
    throw InvalidArgument("per-batch perturbation needs n >= 2");
  }
  std::vector<int> donors;
  for (int i = 0; i < p.n(); ++i) {
    if (p[i] >= spec.eta) donors.push_back(i);
  }
  if (donors.empty()) {
    throw InvalidArgument("per-batch perturbation: no element holds eta mass");
  }
  const int donor = donors[rng.below(donors.size())];
  int receiver = static_cast<int>(rng.below(p.n() - 1));
  if (receiver >= donor) ++receiver;
  return shift_mass(p, donor, receiver, spec.eta);
}

BatchSet sample_good_batches(const GoodBatchSpec& spec, int k,
                             std::size_t count, std::uint64_t seed) {
  if (!(spec.eta >= 0.0 && spec.eta < 1.0)) {
    throw InvalidArgument("eta must lie in [0, 1)");
  }
  Rng rng(seed);
  BatchSet out(spec.target.n(), k);
  out.reserve(count);
  std::vector<int> batch(k);
  const bool per_batch =
      spec.perturbation == Perturbation::kPerBatchRandom && spec.eta > 0.0;
  if (!per_batch) {
    const Distribution d = draw_batch_distribution(spec, rng);
    const CategoricalSampler sampler(d.probs());
    for (std::size_t b = 0; b < count; ++b) {
      DrawBatch(sampler, rng, batch);
      out.push_back(batch);
    }
    return out;
  }
  for (std::size_t b = 0; b < count; ++b) {
    const Distribution d = draw_batch_distribution(spec, rng);
    DrawBatch(CategoricalSampler(d.probs()), rng, batch);
    out.push_back(batch);
  }
  return out;
}

Tensor LowerBoundInstance::mixture_p() const {
  const Tensor base = tensor_power(p_prime, k);
  std::vector<double> e(base.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = (1 - eps) * base[i] + eps * n_p[i];
  }
  return Tensor(2, k, std::move(e));
}

Tensor LowerBoundInstance::mixture_q() const {
  const Tensor base = tensor_power(q_prime, k);
  std::vector<double> e(base.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = (1 - eps) * base[i] + eps * n_q[i];
  }
  return Tensor(2, k, std::move(e));
}

LowerBoundInstance lower_bound_instance(double eps, double eta, int k) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw InvalidArgument("lower_bound_instance: eps must lie in (0, 1/2)");
  }
  if (!(eta >= 0.0 && eta < 0.25)) {
    throw InvalidArgument("lower_bound_instance: eta must lie in [0, 1/4)");
  }
  if (k < 1) throw InvalidArgument("lower_bound_instance: k must be >= 1");

  const double gap = eps / std::sqrt(2.0 * k);
  const Distribution p_prime = Distribution::Bernoulli((1 - gap) / 2);
  const Distribution q_prime = Distribution::Bernoulli((1 + gap) / 2);
  const Tensor pp = tensor_power(p_prime, k);
  const Tensor qq = tensor_power(q_prime, k);

  std::vector<double> upper(pp.size());
  for (std::size_t i = 0; i < upper.size(); ++i) {
    upper[i] = std::max(pp[i], qq[i]);
  }
  // Extended precision keeps N on the simplex at 2^20 entries.
  long double alpha_sum = 0.0L;
  for (double u : upper) alpha_sum += u;
  const double alpha = static_cast<double>(alpha_sum);

  std::vector<double> np(pp.size());
  std::vector<double> nq(pp.size());
  for (std::size_t i = 0; i < np.size(); ++i) {
    np[i] = (upper[i] / alpha - (1 - eps) * pp[i]) / eps;
    nq[i] = (upper[i] / alpha - (1 - eps) * qq[i]) / eps;
  }
  return LowerBoundInstance{
      .p = Distribution::Bernoulli((1 - gap) / 2 - eta),
      .q = Distribution::Bernoulli((1 + gap) / 2 + eta),
      .p_prime = p_prime,
      .q_prime = q_prime,
      .n_p = Tensor(2, k, std::move(np)),
      .n_q = Tensor(2, k, std::move(nq)),
      .eps = eps,
      .eta = eta,
      .k = k,
      .alpha = alpha,
  };
}

AdversaryStrategy AdversaryStrategy::PointMass(int element) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::kPointMass;
  s.element = element;
  return s;
}

AdversaryStrategy AdversaryStrategy::MassShift(Distribution toward) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::kMassShift;
  s.toward = std::move(toward);
  return s;
}

AdversaryStrategy AdversaryStrategy::ReplayWorst(std::uint64_t target_set) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::kReplayWorst;
  s.target_set = target_set;
  return s;
}

AdversaryStrategy AdversaryStrategy::LowerBound(double eta, bool q_side) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::kLowerBound;
  s.eta = eta;
  s.q_side = q_side;
  return s;
}

AdversaryStrategy AdversaryStrategy::Parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  try {
    if (name == "point_mass") {
      const int element = static_cast<int>(parse_real(arg));
      if (element < 1 || element != parse_real(arg)) {
        throw InvalidArgument("point_mass element must be a positive integer");
      }
      return PointMass(element - 1);
    }
    if (name == "mass_shift") {
      if (arg.empty()) throw InvalidArgument("mass_shift needs a distribution");
      const bool numeric = arg.find_first_not_of("0123456789.,eE+-") ==
                           std::string_view::npos;
      return MassShift(numeric ? Distribution(ParseList(arg))
                               : read_distribution(std::string(arg)));
    }
    if (name == "replay_worst") {
      std::uint64_t mask = 0;
      if (arg.empty()) return ReplayWorst(1);
      std::size_t start = 0;
      while (start <= arg.size()) {
        const std::size_t plus = std::min(arg.find('+', start), arg.size());
        const int element = static_cast<int>(parse_real(arg.substr(start, plus - start)));
        if (element < 1 || element > 64) {
          throw InvalidArgument("replay_worst element out of range");
        }
        mask |= 1ULL << (element - 1);
        start = plus + 1;
      }
      return ReplayWorst(mask);
    }
    if (name == "lemma1" || name == "lemma1_optimal") {
      return LowerBound(0.0, arg == "q");
    }
  } catch (const ParseError& e) {
    throw InvalidArgument("bad adversary '" + std::string(text) + "': " + e.what());
  }
  throw InvalidArgument("unknown adversary '" + std::string(text) + "'");
}

std::string AdversaryStrategy::id() const {
  switch (kind) {
    case AdversaryKind::kPointMass:
      return "point_mass:" + std::to_string(element + 1);
    case AdversaryKind::kMassShift: {
      std::string out = "mass_shift:";
      for (int i = 0; i < toward->n(); ++i) {
        if (i > 0) out += ',';
        out += format_real((*toward)[i]);
      }
      return out;
    }
    case AdversaryKind::kReplayWorst: {
      std::string out = "replay_worst:";
      bool first = true;
      for (int i = 0; i < 64; ++i) {
        if (!(target_set >> i & 1U)) continue;
        if (!first) out += '+';
        out += std::to_string(i + 1);
        first = false;
      }
      return out;
    }
    case AdversaryKind::kLowerBound:
      return q_side ? "lemma1:q" : "lemma1";
  }
  return "unknown";
}

BatchSet generate_adversarial_batches(const AdversaryStrategy& strategy,
                                      const BatchSet& good,
                                      const Distribution& p, double eps, int k,
                                      std::size_t count, std::uint64_t seed) {
  const int n = p.n();
  if (good.n() != n || good.k() != k) {
    throw InvalidArgument("good batches do not match (n, k)");
  }
  Rng rng(seed);
  BatchSet out(n, k);
  out.reserve(count);
  switch (strategy.kind) {
    case AdversaryKind::kPointMass: {
      if (strategy.element < 0 || strategy.element >= n) {
        throw InvalidArgument("point_mass element outside alphabet");
      }
      const std::vector<int> batch(k, strategy.element);
      for (std::size_t b = 0; b < count; ++b) out.push_back(batch);
      return out;
    }
    case AdversaryKind::kMassShift: {
      if (!strategy.toward || strategy.toward->n() != n) {
        throw InvalidArgument("mass_shift distribution must have length n");
      }
      const CategoricalSampler sampler(strategy.toward->probs());
      std::vector<int> batch(k);
      for (std::size_t b = 0; b < count; ++b) {
        DrawBatch(sampler, rng, batch);
        out.push_back(batch);
      }
      return out;
    }
    case AdversaryKind::kReplayWorst: {
      if (count == 0) return out;
      if (good.empty()) {
        throw InvalidArgument("replay_worst needs at least one good batch");
      }
      const double expected = k * p.mass(strategy.target_set);
      std::size_t worst = 0;
      double worst_gap = -1.0;
      for (std::size_t b = 0; b < good.size(); ++b) {
        int cnt = 0;
        for (int x : good[b]) cnt += static_cast<int>(strategy.target_set >> x & 1U);
        const double gap = std::abs(cnt - expected);
        if (gap > worst_gap) {
          worst_gap = gap;
          worst = b;
        }
      }
      for (std::size_t b = 0; b < count; ++b) out.push_back(good[worst]);
      return out;
    }
    case AdversaryKind::kLowerBound: {
      if (n != 2) throw InvalidArgument("lemma1 adversary requires n = 2");
      const LowerBoundInstance inst = lower_bound_instance(eps, strategy.eta, k);
      return SampleFromTensor(strategy.q_side ? inst.n_q : inst.n_p, count, rng);
    }
  }
  return out;
}

std::size_t bad_batch_count(std::size_t m, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in [0, 1)");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(m) * eps - 0.5));
}

Dataset assemble_dataset(const BatchSet& good, const BatchSet& bad,
                         std::uint64_t seed, double eta) {
  if (good.n() != bad.n() || good.k() != bad.k()) {
    throw InvalidArgument("assemble_dataset: good and bad batches differ in n or k");
  }
  const std::size_t m = good.size() + bad.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  Dataset d{.batches = BatchSet(good.n(), good.k()),
            .is_bad = std::vector<bool>(m, false),
            .eps = m == 0 ? 0.0 : static_cast<double>(bad.size()) / m,
            .eta = eta};
  d.batches.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t src = order[i];
    if (src < good.size()) {
      d.batches.push_back(good[src]);
    } else {
      d.batches.push_back(bad[src - good.size()]);
      d.is_bad[i] = true;
    }
  }
  return d;
}

}  // namespace robustdist
