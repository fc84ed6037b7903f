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

// Python bindings. Distributions are lists of floats; batches are lists of
// lists of 1-based element indices, matching the file formats.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "robustdist/adversary.h"
#include "robustdist/batch_io.h"
#include "robustdist/core.h"
#include "robustdist/dist_set.h"
#include "robustdist/harness.h"
#include "robustdist/rng.h"
#include "robustdist/subset_lp.h"
#include "robustdist/verify.h"

namespace py = pybind11;

namespace robustdist {
namespace {

using Batches = std::vector<std::vector<int>>;

BatchSet ToBatchSet(const Batches& batches, int n) {
  if (batches.empty()) throw InvalidArgument("no batches");
  BatchSet out(n, static_cast<int>(batches.front().size()));
  out.reserve(batches.size());
  std::vector<int> zero_based;
  for (const std::vector<int>& b : batches) {
    zero_based.assign(b.begin(), b.end());
    for (int& x : zero_based) --x;
    out.push_back(zero_based);
  }
  return out;
}

Batches FromBatchSet(const BatchSet& batches) {
  Batches out;
  out.reserve(batches.size());
  for (std::size_t i = 0; i < batches.size(); ++i) {
    std::vector<int> b(batches[i].begin(), batches[i].end());
    for (int& x : b) ++x;
    out.push_back(std::move(b));
  }
  return out;
}

py::dict Simulate(int n, int k, std::size_t m, double eps, double eta,
                  const std::string& adversary, std::uint64_t seed,
                  const std::string& truth, const std::string& perturbation) {
  ExperimentConfig c = ExperimentConfig::Parse("perturbation=" + perturbation);
  c.n = n;
  c.k = k;
  c.m = m;
  c.eps = eps;
  c.eta = eta;
  c.adversary = adversary;
  c.seed = seed;
  c.truth = truth;
  c.Validate();
  const SimulatedTrial trial = simulate_trial(c, derive_seed(seed, 0));
  py::dict out;
  out["batches"] = FromBatchSet(trial.data.batches);
  out["is_bad"] = trial.data.is_bad;
  out["truth"] = trial.truth.probs();
  return out;
}

py::dict SubsetLp(const Batches& batches, int n, double eps, double eta,
                  double delta) {
  const SubsetLpResult r =
      learn_subset_lp(ToBatchSet(batches, n), eps, eta, delta);
  py::dict out;
  out["q"] = r.q.probs();
  out["degraded"] = r.degraded;
  out["eta"] = r.eta;
  out["radius"] = r.radius;
  out["max_deviation"] = r.max_deviation;
  out["within_proved_range"] = r.within_proved_range;
  py::dict estimates;
  for (const SubsetEstimate& e : r.estimates) {
    estimates[py::int_(e.subset)] =
        e.estimate ? py::object(py::float_(*e.estimate)) : py::object(py::none());
  }
  out["estimates"] = estimates;
  return out;
}

py::dict FitToDict(const TensorFit& fit) {
  py::dict out;
  std::vector<std::vector<double>> candidates;
  for (const Distribution& c : fit.set.candidates) candidates.push_back(c.probs());
  out["q0"] = fit.q0.probs();
  out["objective"] = fit.objective;
  out["best"] = fit.best;
  out["candidates"] = candidates;
  out["origins"] = fit.set.origins;
  out["objectives"] = fit.objectives;
  out["raw_count"] = fit.set.raw_count;
  out["renormalized"] = fit.set.renormalized;
  return out;
}

py::dict LowerBound(double eps, double eta, int k) {
  const LowerBoundInstance inst = lower_bound_instance(eps, eta, k);
  py::dict out;
  out["p"] = inst.p.probs();
  out["q"] = inst.q.probs();
  out["p_prime"] = inst.p_prime.probs();
  out["q_prime"] = inst.q_prime.probs();
  out["n_p"] = inst.n_p.entries();
  out["n_q"] = inst.n_q.entries();
  out["mixture_p"] = inst.mixture_p().entries();
  out["mixture_q"] = inst.mixture_q().entries();
  out["alpha"] = inst.alpha;
  return out;
}

py::dict ReportToDict(const LemmaCheckReport& r) {
  py::dict out;
  out["lemma_id"] = r.lemma_id;
  out["grid_size"] = r.grid_size;
  out["worst_margin"] = r.worst_margin;
  out["worst_point"] = r.worst_point;
  out["held"] = r.held();
  return out;
}

py::list Experiment(const std::string& config_text) {
  const ExperimentOutput output =
      run_experiment(ExperimentConfig::Parse(config_text));
  py::list out;
  for (const TrialRecord& r : output.records) {
    py::dict d;
    d["trial_index"] = r.trial_index;
    d["algorithm"] = r.algorithm;
    d["m"] = r.m;
    d["adversary"] = r.adversary;
    d["seed_used"] = r.seed_used;
    d["tv_error"] = r.tv_error;
    d["degraded"] = r.degraded;
    out.append(d);
  }
  return out;
}

}  // namespace
}  // namespace robustdist

PYBIND11_MODULE(robustdist, m) {
  using namespace robustdist;
  m.doc() = "Robust discrete distribution learning from contaminated batches";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "tv_distance",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return tv_distance(Distribution(p), Distribution(q));
      },
      py::arg("p"), py::arg("q"));
  m.def(
      "tensor_power",
      [](const std::vector<double>& p, int k) {
        return tensor_power(Distribution(p), k).entries();
      },
      py::arg("p"), py::arg("k"));
  m.def(
      "binomial_pmf",
      [](int k, double theta) { return binomial_pmf(k, theta).weights(); },
      py::arg("k"), py::arg("theta"));
  m.def("lower_bound_instance", &LowerBound, py::arg("eps"), py::arg("eta"),
        py::arg("k"));
  m.def("simulate", &Simulate, py::arg("n"), py::arg("k"), py::arg("m"),
        py::arg("eps"), py::arg("eta") = 0.0,
        py::arg("adversary") = "point_mass:1", py::arg("seed") = 0,
        py::arg("truth") = "uniform", py::arg("perturbation") = "none");
  m.def(
      "empirical_baseline",
      [](const Batches& batches, int n) {
        return empirical_baseline(ToBatchSet(batches, n)).probs();
      },
      py::arg("batches"), py::arg("n"));
  m.def(
      "binomial_est",
      [](const std::vector<double>& f, double eps, double eta) -> py::object {
        const SubsetEstimate e = binomial_est(
            CountDistribution(f),
            BinomialEstParams(eps, eta, static_cast<int>(f.size()) - 1));
        if (!e.estimate) return py::none();
        return py::float_(*e.estimate);
      },
      py::arg("f"), py::arg("eps"), py::arg("eta"),
      "Estimate of the success probability, or None when every window fails.");
  m.def("learn_subset_lp", &SubsetLp, py::arg("batches"), py::arg("n"),
        py::arg("eps"), py::arg("eta") = 0.0, py::arg("delta") = 0.1);
  m.def(
      "dist_set",
      [](const std::vector<double>& entries, int n, int k) {
        return FitToDict(dist_set_tensor_input(Tensor(n, k, entries)));
      },
      py::arg("tensor"), py::arg("n"), py::arg("k"));
  m.def(
      "learn_tensor",
      [](const Batches& batches, int n) {
        return FitToDict(learn_tensor(ToBatchSet(batches, n)));
      },
      py::arg("batches"), py::arg("n"));
  m.def("lemma_ids", &lemma_ids);
  m.def(
      "run_lemma",
      [](const std::string& id, bool dense) {
        return ReportToDict(run_lemma(id, dense));
      },
      py::arg("lemma_id"), py::arg("dense") = false);
  m.def("run_experiment", &Experiment, py::arg("config"),
        "Runs a key=value experiment config and returns one dict per record.");
  m.def(
      "read_batches",
      [](const std::string& path) {
        const BatchSet b = read_batches(path);
        return py::make_tuple(FromBatchSet(b), b.n());
      },
      py::arg("path"));
  m.def(
      "write_batches",
      [](const std::string& path, const Batches& batches, int n) {
        write_batches(path, ToBatchSet(batches, n));
      },
      py::arg("path"), py::arg("batches"), py::arg("n"));
}
