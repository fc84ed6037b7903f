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

// Command-line front end. Exit codes: 0 success, 2 invalid configuration,
// 3 degraded estimate (estimate only), 4 IO or parse failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>

#include "CLI11.hpp"
#include "robustdist/adversary.h"
#include "robustdist/batch_io.h"
#include "robustdist/core.h"
#include "robustdist/dist_set.h"
#include "robustdist/harness.h"
#include "robustdist/rng.h"
#include "robustdist/subset_lp.h"
#include "robustdist/verify.h"

namespace robustdist {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;
constexpr int kExitIo = 4;

struct SimulateArgs {
  ExperimentConfig config;
  std::string out;
  std::string truth_out;
};

struct EstimateArgs {
  std::string algo;
  std::string batches;
  double eps = 0.0;
  double eta = 0.0;
  double delta = 0.1;
  std::string out;
  std::string dump_subsets;
  std::string dump_candidates;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  bool dump_distributions = false;
};

struct VerifyArgs {
  std::string lemma;
  bool dense = false;
  std::string out;
};

struct LowerBoundArgs {
  double eps = 0.0;
  double eta = 0.0;
  int k = 1;
  std::string out;
};

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void CloseOut(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

int RunSimulate(const SimulateArgs& args) {
  args.config.Validate();
  const SimulatedTrial trial =
      simulate_trial(args.config, derive_seed(args.config.seed, 0));
  write_batches(args.out, trial.data.batches);
  write_provenance(provenance_path(args.out), trial.data.is_bad);
  if (!args.truth_out.empty()) write_distribution(args.truth_out, trial.truth);
  return kExitOk;
}

int RunEstimate(const EstimateArgs& args) {
  const Algorithm algorithm = parse_algorithm(args.algo);
  const BatchSet batches = read_batches(args.batches);
  if (batches.empty()) throw ConfigError("batch file has no batches");
  bool degraded = false;
  std::optional<Distribution> q;
  switch (algorithm) {
    case Algorithm::kEmpirical:
      q = empirical_baseline(batches);
      break;
    case Algorithm::kSubsetLp: {
      SubsetLpResult r = learn_subset_lp(batches, args.eps, args.eta, args.delta);
      if (!args.dump_subsets.empty()) {
        write_subset_estimates(args.dump_subsets, r.estimates);
      }
      degraded = r.degraded;
      q = std::move(r.q);
      break;
    }
    case Algorithm::kDistSet: {
      TensorFit fit = learn_tensor(batches);
      if (!args.dump_candidates.empty()) {
        write_candidates(args.dump_candidates, fit, std::nullopt);
      }
      degraded = fit.set.renormalized;
      q = std::move(fit.q0);
      break;
    }
  }
  write_distribution(args.out, *q);
  if (degraded) {
    std::cerr << "warning: estimate is degraded\n";
    return kExitDegraded;
  }
  return kExitOk;
}

int RunExperiment(const ExperimentArgs& args) {
  ExperimentConfig config = ExperimentConfig::Load(args.config);
  config.output_path = args.out;
  const ExperimentOutput output = run_experiment(config);
  write_results(args.out, output.records);
  if (args.dump_distributions) {
    write_distribution_dump(distributions_path(args.out), output);
  }
  return kExitOk;
}

int RunVerify(const VerifyArgs& args) {
  std::vector<LemmaCheckReport> reports;
  if (args.lemma.empty()) {
    reports = run_lemma_suite(args.dense);
  } else {
    reports.push_back(run_lemma(args.lemma, args.dense));
  }
  std::ofstream out = OpenOut(args.out);
  write_lemma_reports(out, reports);
  CloseOut(out, args.out);
  for (const LemmaCheckReport& r : reports) {
    std::cout << r.lemma_id << ' ' << (r.held() ? "held" : "VIOLATED")
              << " worst_margin=" << format_real(r.worst_margin) << '\n';
  }
  return kExitOk;
}

void WriteBlock(std::ostream& out, const std::string& name,
                std::span<const double> values) {
  out << "[" << name << "] " << values.size() << '\n';
  for (double v : values) out << format_real(v) << '\n';
}

int RunLowerBound(const LowerBoundArgs& args) {
  const LowerBoundInstance inst = [&] {
    try {
      return lower_bound_instance(args.eps, args.eta, args.k);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }();
  std::ofstream out = OpenOut(args.out);
  out << "# eps=" << format_real(inst.eps) << " eta=" << format_real(inst.eta)
      << " k=" << inst.k << " alpha=" << format_real(inst.alpha) << '\n';
  WriteBlock(out, "p", inst.p.probs());
  WriteBlock(out, "q", inst.q.probs());
  WriteBlock(out, "p_prime", inst.p_prime.probs());
  WriteBlock(out, "q_prime", inst.q_prime.probs());
  WriteBlock(out, "n_p", inst.n_p.entries());
  WriteBlock(out, "n_q", inst.n_q.entries());
  WriteBlock(out, "mixture", inst.mixture_p().entries());
  CloseOut(out, args.out);
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Robust distribution learning from contaminated batches"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate a contaminated batch file and its provenance");
  simulate->add_option("--n", sim.config.n, "Alphabet size")->required();
  simulate->add_option("--k", sim.config.k, "Samples per batch")->required();
  simulate->add_option("--m", sim.config.m, "Number of batches (0 = auto)");
  simulate->add_option("--eps", sim.config.eps, "Adversarial fraction");
  simulate->add_option("--eta", sim.config.eta, "Good-batch perturbation");
  simulate->add_option("--delta", sim.config.delta, "Failure probability");
  simulate->add_option("--adversary", sim.config.adversary,
                       "point_mass:t | mass_shift:file | replay_worst | lemma1");
  simulate->add_option("--seed", sim.config.seed, "Master seed");
  simulate->add_option("--truth,--p", sim.config.truth,
                       "uniform | dirichlet | comma-separated probabilities");
  std::string perturbation = "none";
  simulate->add_option("--perturbation", perturbation,
                       "none | fixed_shift | per_batch_random");
  simulate->add_option("--out", sim.out, "Batch file")->required();
  simulate->add_option("--truth-out", sim.truth_out,
                       "Optional file receiving the ground truth");

  EstimateArgs est;
  CLI::App* estimate =
      app.add_subcommand("estimate", "Estimate the distribution from batches");
  estimate->add_option("--algo", est.algo, "empirical | subsetlp | distset")
      ->required();
  estimate->add_option("--batches", est.batches, "Batch file")->required();
  estimate->add_option("--eps", est.eps, "Adversarial fraction");
  estimate->add_option("--eta", est.eta, "Perturbation radius (0 = eps/sqrt(k))");
  estimate->add_option("--delta", est.delta, "Failure probability");
  estimate->add_option("--out", est.out, "Output distribution")->required();
  estimate->add_option("--dump-subsets", est.dump_subsets,
                       "CSV of per-subset estimates (subsetlp)");
  estimate->add_option("--dump-candidates", est.dump_candidates,
                       "CSV of candidates (distset)");

  ExperimentArgs exp;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  experiment->add_option("--config", exp.config, "key=value config file")
      ->required();
  experiment->add_option("--out", exp.out, "Results CSV")->required();
  experiment->add_flag("--dump-distributions", exp.dump_distributions,
                       "Also write truths and estimates");

  VerifyArgs ver;
  CLI::App* verify =
      app.add_subcommand("verify-lemmas", "Numerically check the inequalities");
  verify->add_option("--lemma", ver.lemma, "Single check id");
  verify->add_flag("--dense", ver.dense, "Use the dense grids");
  verify->add_option("--out", ver.out, "Report CSV")->required();

  LowerBoundArgs lb;
  CLI::App* lowerbound =
      app.add_subcommand("lowerbound", "Dump the lower-bound instance");
  lowerbound->add_option("--eps", lb.eps, "Adversarial fraction")->required();
  lowerbound->add_option("--eta", lb.eta, "Perturbation radius")->required();
  lowerbound->add_option("--k", lb.k, "Batch size")->required();
  lowerbound->add_option("--out", lb.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      sim.config.perturbation =
          ExperimentConfig::Parse("perturbation=" + perturbation).perturbation;
      return RunSimulate(sim);
    }
    if (estimate->parsed()) return RunEstimate(est);
    if (experiment->parsed()) return RunExperiment(exp);
    if (verify->parsed()) return RunVerify(ver);
    if (lowerbound->parsed()) return RunLowerBound(lb);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace robustdist

int main(int argc, char** argv) { return robustdist::Main(argc, argv); }
