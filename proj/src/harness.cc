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
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "parallel.h"
#include "robustdist/batch_io.h"
#include "robustdist/dist_set.h"
#include "robustdist/subset_lp.h"

namespace robustdist {
namespace {

constexpr std::size_t kMaxAutoBatches = 1'000'000;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T ParseInteger(std::string_view text, std::string_view key) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer for " + std::string(key) + ": '" +
                      std::string(text) + "'");
  }
  return value;
}

double ParseReal(std::string_view text, std::string_view key) {
  try {
    return parse_real(text);
  } catch (const std::exception&) {
    throw ConfigError("invalid real for " + std::string(key) + ": '" +
                      std::string(text) + "'");
  }
}

bool ParseBool(std::string_view text, std::string_view key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean for " + std::string(key));
}

std::string_view PerturbationName(Perturbation p) {
  switch (p) {
    case Perturbation::kNone:
      return "none";
    case Perturbation::kFixedShift:
      return "fixed_shift";
    case Perturbation::kPerBatchRandom:
      return "per_batch_random";
  }
  return "none";
}

Perturbation ParsePerturbation(std::string_view text) {
  if (text == "none") return Perturbation::kNone;
  if (text == "fixed_shift") return Perturbation::kFixedShift;
  if (text == "per_batch_random") return Perturbation::kPerBatchRandom;
  throw ConfigError("unknown perturbation '" + std::string(text) + "'");
}

std::optional<Distribution> FixedTruth(const ExperimentConfig& c) {
  if (c.truth == "uniform") return Distribution::Uniform(c.n);
  if (c.truth == "dirichlet") return std::nullopt;
  std::vector<double> probs;
  for (std::string_view part : Split(c.truth, ',')) {
    probs.push_back(ParseReal(part, "truth"));
  }
  try {
    return Distribution(std::move(probs));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("truth: ") + e.what());
  }
}

// Dirichlet(1, ..., 1) as the spacings of sorted uniforms.
Distribution DirichletUniform(int n, Rng& rng) {
  std::vector<double> cuts(static_cast<std::size_t>(n) - 1);
  for (double& c : cuts) c = rng.uniform();
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> probs(static_cast<std::size_t>(n));
  double prev = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    probs[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  probs[n - 1] = 1.0 - prev;
  return Distribution(std::move(probs));
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Splits one CSV line with RFC 4180 quoting. Returns nullopt on an
// unterminated quote.
std::optional<std::vector<std::string>> SplitCsv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) return std::nullopt;
  return fields;
}

constexpr std::string_view kResultsHeader =
    "trial_index,algorithm,n,k,m,eps,eta,adversary,seed_used,tv_error,"
    "runtime_ms,degraded";

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kEmpirical:
      return "empirical";
    case Algorithm::kSubsetLp:
      return "subsetlp";
    case Algorithm::kDistSet:
      return "distset";
  }
  return "empirical";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "empirical") return Algorithm::kEmpirical;
  if (name == "subsetlp") return Algorithm::kSubsetLp;
  if (name == "distset") return Algorithm::kDistSet;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

Distribution empirical_baseline(const BatchSet& batches) {
  if (batches.empty()) throw InvalidArgument("empirical_baseline: no batches");
  std::vector<double> counts(static_cast<std::size_t>(batches.n()), 0.0);
  for (int x : batches.flat()) counts[x] += 1.0;
  const double total = static_cast<double>(batches.flat().size());
  for (double& c : counts) c /= total;
  return Distribution(std::move(counts));
}

ExperimentConfig ExperimentConfig::Parse(std::string_view text) {
  ExperimentConfig c;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (seen[key]++ > 0) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " +
                        key);
    }
    if (key == "n") {
      c.n = ParseInteger<int>(value, key);
    } else if (key == "k") {
      c.k = ParseInteger<int>(value, key);
    } else if (key == "m") {
      c.m = value == "auto" ? 0 : ParseInteger<std::size_t>(value, key);
    } else if (key == "trials") {
      c.trials = ParseInteger<int>(value, key);
    } else if (key == "eps") {
      c.eps = ParseReal(value, key);
    } else if (key == "eta") {
      c.eta = ParseReal(value, key);
    } else if (key == "delta") {
      c.delta = ParseReal(value, key);
    } else if (key == "adversary") {
      c.adversary = std::string(value);
    } else if (key == "algorithms") {
      c.algorithms.clear();
      for (std::string_view name : Split(value, ',')) {
        c.algorithms.push_back(parse_algorithm(name));
      }
    } else if (key == "seed") {
      c.seed = ParseInteger<std::uint64_t>(value, key);
    } else if (key == "output_path") {
      c.output_path = std::string(value);
    } else if (key == "sample_multiplier") {
      c.sample_multiplier = ParseReal(value, key);
    } else if (key == "truth") {
      c.truth = std::string(value);
    } else if (key == "perturbation") {
      c.perturbation = ParsePerturbation(value);
    } else if (key == "shift_donor") {
      c.shift_donor = ParseInteger<int>(value, key);
    } else if (key == "shift_receiver") {
      c.shift_receiver = ParseInteger<int>(value, key);
    } else if (key == "record_runtime") {
      c.record_runtime = ParseBool(value, key);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key " +
                        key);
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return Parse(text.str());
}

std::string ExperimentConfig::ToText() const {
  std::ostringstream out;
  out << "n=" << n << "\nk=" << k << "\nm=" << m << "\ntrials=" << trials
      << "\neps=" << format_real(eps) << "\neta=" << format_real(eta)
      << "\ndelta=" << format_real(delta) << "\nadversary=" << adversary
      << "\nalgorithms=";
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    out << (i ? "," : "") << algorithm_name(algorithms[i]);
  }
  out << "\nseed=" << seed << "\noutput_path=" << output_path
      << "\nsample_multiplier=" << format_real(sample_multiplier)
      << "\ntruth=" << truth << "\nperturbation=" << PerturbationName(perturbation)
      << "\nshift_donor=" << shift_donor << "\nshift_receiver=" << shift_receiver
      << "\nrecord_runtime=" << (record_runtime ? "true" : "false") << '\n';
  return out.str();
}

std::size_t ExperimentConfig::resolved_m() const {
  if (m > 0) return m;
  if (!(eps > 0.0)) throw ConfigError("m=auto requires eps > 0");
  const double raw =
      sample_multiplier * (n + k + std::log(1.0 / delta)) / (eps * eps);
  return static_cast<std::size_t>(
      std::min(std::ceil(raw), static_cast<double>(kMaxAutoBatches)));
}

AdversaryStrategy ExperimentConfig::strategy() const {
  try {
    AdversaryStrategy s = AdversaryStrategy::Parse(adversary);
    if (s.kind == AdversaryKind::kLowerBound) s.eta = eta;
    return s;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const IoError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n < 1) fail("n must be >= 1");
  if (k < 1) fail("k must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) fail("eps must lie in [0, 1)");
  if (!(eta >= 0.0 && eta < 1.0)) fail("eta must lie in [0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(sample_multiplier > 0.0)) fail("sample_multiplier must be > 0");
  if (algorithms.empty()) fail("algorithms must not be empty");
  if (resolved_m() < 1) fail("m must be >= 1");

  const AdversaryStrategy s = strategy();
  switch (s.kind) {
    case AdversaryKind::kPointMass:
      if (s.element >= n) fail("point_mass element exceeds n");
      break;
    case AdversaryKind::kMassShift:
      if (s.toward->n() != n) fail("mass_shift distribution has wrong length");
      break;
    case AdversaryKind::kReplayWorst:
      if (n < 64 && (s.target_set >> n) != 0) {
        fail("replay_worst set exceeds n");
      }
      break;
    case AdversaryKind::kLowerBound:
      if (n != 2) fail("lemma1 adversary requires n = 2");
      if (!(eps > 0.0 && eps < 0.5)) fail("lemma1 adversary requires eps in (0, 1/2)");
      if (!(eta < 0.25)) fail("lemma1 adversary requires eta < 1/4");
      break;
  }

  if (s.kind != AdversaryKind::kLowerBound) {
    const std::optional<Distribution> truth_p = FixedTruth(*this);
    if (truth_p && truth_p->n() != n) fail("truth has wrong length");
    if (perturbation != Perturbation::kNone && n < 2) {
      fail("perturbation requires n >= 2");
    }
    if (perturbation == Perturbation::kFixedShift) {
      if (shift_donor < 1 || shift_donor > n || shift_receiver < 1 ||
          shift_receiver > n || shift_donor == shift_receiver) {
        fail("shift_donor/shift_receiver must be distinct elements of [n]");
      }
      if (truth_p && (*truth_p)[shift_donor - 1] < eta) {
        fail("shift donor holds less than eta");
      }
    }
  }

  for (Algorithm a : algorithms) {
    if (a == Algorithm::kSubsetLp) {
      if (n > 12) fail("subsetlp supports n <= 12");
      if (!(eps > 0.0 && eps < 1.0 / 15)) fail("subsetlp requires eps in (0, 1/15)");
      const double eff = eta == 0.0 ? eps / std::sqrt(k) : eta;
      if (eff > 0.125) fail("subsetlp requires eta <= 1/8");
    }
    if (a == Algorithm::kDistSet) {
      try {
        checked_tensor_size(n, k);
      } catch (const InvalidArgument& e) {
        fail(std::string("distset: ") + e.what());
      }
    }
  }
}

SimulatedTrial simulate_trial(const ExperimentConfig& config,
                              std::uint64_t trial_seed) {
  const AdversaryStrategy strategy = config.strategy();
  const std::size_t m = config.resolved_m();
  Distribution truth = Distribution::Uniform(config.n);
  GoodBatchSpec spec{.target = truth};
  if (strategy.kind == AdversaryKind::kLowerBound) {
    const LowerBoundInstance inst =
        lower_bound_instance(config.eps, config.eta, config.k);
    truth = strategy.q_side ? inst.q : inst.p;
    spec.target = strategy.q_side ? inst.q_prime : inst.p_prime;
  } else {
    if (std::optional<Distribution> fixed = FixedTruth(config)) {
      truth = *fixed;
    } else {
      Rng rng(derive_seed(trial_seed, 0));
      truth = DirichletUniform(config.n, rng);
    }
    spec.target = truth;
    spec.eta = config.eta;
    spec.perturbation = config.perturbation;
    spec.donor = config.shift_donor - 1;
    spec.receiver = config.shift_receiver - 1;
  }
  const std::size_t bad = bad_batch_count(m, config.eps);
  const BatchSet good = sample_good_batches(spec, config.k, m - bad,
                                            derive_seed(trial_seed, 1));
  const BatchSet adv =
      generate_adversarial_batches(strategy, good, truth, config.eps, config.k,
                                   bad, derive_seed(trial_seed, 2));
  return {truth, assemble_dataset(good, adv, derive_seed(trial_seed, 3),
                                  config.eta)};
}

Estimate run_estimator(Algorithm algorithm, const BatchSet& batches, double eps,
                       double eta, double delta) {
  switch (algorithm) {
    case Algorithm::kEmpirical:
      return {empirical_baseline(batches)};
    case Algorithm::kSubsetLp: {
      SubsetLpResult r = learn_subset_lp(batches, eps, eta, delta);
      return {std::move(r.q), r.degraded};
    }
    case Algorithm::kDistSet: {
      TensorFit fit = learn_tensor(batches);
      return {std::move(fit.q0), fit.set.renormalized};
    }
  }
  throw InvalidArgument("unknown algorithm");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.Validate();
  const std::size_t m = config.resolved_m();
  const std::string adversary_id = config.strategy().id();
  const std::size_t per_trial = config.algorithms.size();
  const std::size_t total = per_trial * static_cast<std::size_t>(config.trials);

  std::vector<std::optional<TrialRecord>> records(total);
  std::vector<std::optional<Distribution>> truths(total);
  std::vector<std::optional<Distribution>> estimates(total);
  internal::parallel_for(
      static_cast<std::size_t>(config.trials), [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(config.seed, t);
        const SimulatedTrial trial = simulate_trial(config, trial_seed);
        for (std::size_t a = 0; a < per_trial; ++a) {
          const Algorithm algorithm = config.algorithms[a];
          const auto start = std::chrono::steady_clock::now();
          Estimate est{Distribution::Uniform(config.n), true};
          try {
            est = run_estimator(algorithm, trial.data.batches, config.eps,
                                config.eta, config.delta);
          } catch (const std::exception&) {
            est = {Distribution::Uniform(config.n), true};
          }
          const double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
          const std::size_t slot = t * per_trial + a;
          records[slot] = TrialRecord{
              .trial_index = static_cast<int>(t),
              .algorithm = std::string(algorithm_name(algorithm)),
              .n = config.n,
              .k = config.k,
              .m = m,
              .eps = config.eps,
              .eta = config.eta,
              .adversary = adversary_id,
              .seed_used = trial_seed,
              .tv_error = tv_distance(trial.truth, est.q),
              .runtime_ms = config.record_runtime ? ms : 0.0,
              .degraded = est.degraded};
          truths[slot] = trial.truth;
          estimates[slot] = std::move(est.q);
        }
      });

  ExperimentOutput out;
  for (std::size_t i = 0; i < total; ++i) {
    out.records.push_back(std::move(*records[i]));
    out.truths.push_back(std::move(*truths[i]));
    out.estimates.push_back(std::move(*estimates[i]));
  }
  return out;
}

void write_results(const std::filesystem::path& path,
                   const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kResultsHeader << '\n';
  for (const TrialRecord& r : records) {
    out << r.trial_index << ',' << CsvField(r.algorithm) << ',' << r.n << ','
        << r.k << ',' << r.m << ',' << format_real(r.eps) << ','
        << format_real(r.eta) << ',' << CsvField(r.adversary) << ','
        << r.seed_used << ',' << format_real(r.tv_error) << ','
        << format_real(r.runtime_ms) << ',' << (r.degraded ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TrialRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TrialRecord> records;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kResultsHeader) fail("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (!fields) fail("unterminated quote");
    if (fields->size() != 12) {
      fail("expected 12 fields, found " + std::to_string(fields->size()));
    }
    const auto& f = *fields;
    TrialRecord r;
    try {
      r.trial_index = ParseInteger<int>(f[0], "trial_index");
      r.algorithm = f[1];
      r.n = ParseInteger<int>(f[2], "n");
      r.k = ParseInteger<int>(f[3], "k");
      r.m = ParseInteger<std::size_t>(f[4], "m");
      r.eps = parse_real(f[5]);
      r.eta = parse_real(f[6]);
      r.adversary = f[7];
      r.seed_used = ParseInteger<std::uint64_t>(f[8], "seed_used");
      r.tv_error = parse_real(f[9]);
      r.runtime_ms = parse_real(f[10]);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (f[11] != "0" && f[11] != "1") fail("degraded must be 0 or 1");
    r.degraded = f[11] == "1";
    records.push_back(std::move(r));
  }
  if (line_no == 0) fail("missing header");
  return records;
}

std::filesystem::path distributions_path(const std::filesystem::path& results) {
  return std::filesystem::path(results.string() + ".distributions.csv");
}

void write_distribution_dump(const std::filesystem::path& path,
                             const ExperimentOutput& output) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "trial_index,algorithm,role,element,probability\n";
  for (std::size_t i = 0; i < output.records.size(); ++i) {
    const TrialRecord& r = output.records[i];
    for (const auto& [role, dist] :
         {std::pair<const char*, const Distribution*>{"truth", &output.truths[i]},
          {"estimate", &output.estimates[i]}}) {
      for (int e = 0; e < dist->n(); ++e) {
        out << r.trial_index << ',' << r.algorithm << ',' << role << ','
            << e + 1 << ',' << format_real((*dist)[e]) << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace robustdist
