// Copyright 2026 The hamcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hamcert/certify_dynamics.hpp"
#include "hamcert/dynamics.hpp"
#include "hamcert/error.hpp"
#include "hamcert/gibbs.hpp"
#include "hamcert/gibbs_protocols.hpp"
#include "hamcert/lemma_suite.hpp"
#include "hamcert/pauli.hpp"
#include "hamcert/report.hpp"
#include "hamcert/rng.hpp"
#include "hamcert/shadows.hpp"

namespace hamcert {

inline const std::vector<std::string>& battery_names() {
  static const std::vector<std::string> names = {"certify-dynamics", "learn-gibbs",
                                                 "certify-gibbs", "verify-invariants", "bench"};
  return names;
}

/**
 * Everything a battery reads. JSON keys are the CLI flag names without the
 * leading dashes; absent optionals serialize as null.
 */
struct ExperimentConfig {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100;
  unsigned jobs = 0;  // 0 = all cores; never changes results
  std::string out;
  std::string csv;

  std::string h;   // Hamiltonian files
  std::string h0;
  std::string h_text;  // inline Hamiltonians, used when the file is empty
  std::string h0_text;
  int n = 0;  // 0 = from the Hamiltonian
  int k = 0;

  std::optional<double> eps;    // battery default when absent
  std::optional<double> delta;
  double beta = 1.0;

  double spam = 0.0;
  std::string spam_mode = "random";
  double c_op = 1.0;
  int repetitions = 8;
  double trotter_constant = 1.0;
  bool trotter_exact_check = false;

  std::optional<double> net_spacing;
  std::optional<std::uint64_t> copies_override;
  double guarantee_factor = 5.0;
  bool exact = false;  // exact expectations instead of sampled shadows

  std::uint64_t samples = 1000;
  std::uint64_t t_draws = 4000;

  std::vector<double> bench_eps = {0.5, 0.25, 0.125, 0.0625};
  bool calibrate_shadows = false;

  double target = 0.9;  // declared success-rate threshold
};

namespace detail {

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
void read_field(const Json& j, const char* key, T& dst) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    dst = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& dst) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    dst.reset();
    return;
  }
  T v{};
  read_field(j, key, v);
  dst = v;
}

}  // namespace detail

inline Json config_to_json(const ExperimentConfig& c) {
  return Json{{"subcommand", c.subcommand},
              {"seed", c.seed},
              {"trials", c.trials},
              {"jobs", c.jobs},
              {"out", c.out},
              {"csv", c.csv},
              {"h", c.h},
              {"h0", c.h0},
              {"h-text", c.h_text},
              {"h0-text", c.h0_text},
              {"n", c.n},
              {"k", c.k},
              {"eps", detail::opt_json(c.eps)},
              {"delta", detail::opt_json(c.delta)},
              {"beta", c.beta},
              {"spam", c.spam},
              {"spam-mode", c.spam_mode},
              {"c-op", c.c_op},
              {"repetitions", c.repetitions},
              {"trotter-constant", c.trotter_constant},
              {"trotter-exact-check", c.trotter_exact_check},
              {"net-spacing", detail::opt_json(c.net_spacing)},
              {"copies-override", detail::opt_json(c.copies_override)},
              {"guarantee-factor", c.guarantee_factor},
              {"exact", c.exact},
              {"samples", c.samples},
              {"t-draws", c.t_draws},
              {"bench-eps", c.bench_eps},
              {"calibrate-shadows", c.calibrate_shadows},
              {"target", c.target}};
}

/// Fields missing from `j` keep the values already in `base`. Unknown keys
/// are rejected so that typos do not silently fall back to defaults.
inline ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {}) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  const Json known = config_to_json(base);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("config: unknown key '" + key + "'");
  }
  ExperimentConfig c = std::move(base);
  detail::read_field(j, "subcommand", c.subcommand);
  detail::read_field(j, "seed", c.seed);
  detail::read_field(j, "trials", c.trials);
  detail::read_field(j, "jobs", c.jobs);
  detail::read_field(j, "out", c.out);
  detail::read_field(j, "csv", c.csv);
  detail::read_field(j, "h", c.h);
  detail::read_field(j, "h0", c.h0);
  detail::read_field(j, "h-text", c.h_text);
  detail::read_field(j, "h0-text", c.h0_text);
  detail::read_field(j, "n", c.n);
  detail::read_field(j, "k", c.k);
  detail::read_optional(j, "eps", c.eps);
  detail::read_optional(j, "delta", c.delta);
  detail::read_field(j, "beta", c.beta);
  detail::read_field(j, "spam", c.spam);
  detail::read_field(j, "spam-mode", c.spam_mode);
  detail::read_field(j, "c-op", c.c_op);
  detail::read_field(j, "repetitions", c.repetitions);
  detail::read_field(j, "trotter-constant", c.trotter_constant);
  detail::read_field(j, "trotter-exact-check", c.trotter_exact_check);
  detail::read_optional(j, "net-spacing", c.net_spacing);
  detail::read_optional(j, "copies-override", c.copies_override);
  detail::read_field(j, "guarantee-factor", c.guarantee_factor);
  detail::read_field(j, "exact", c.exact);
  detail::read_field(j, "samples", c.samples);
  detail::read_field(j, "t-draws", c.t_draws);
  detail::read_field(j, "bench-eps", c.bench_eps);
  detail::read_field(j, "calibrate-shadows", c.calibrate_shadows);
  detail::read_field(j, "target", c.target);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

/// Compact one-line form used in records, e.g. "XI:0.5 ZZ:-0.25".
inline std::string compact_hamiltonian(const LocalHamiltonian& h) {
  if (h.terms().empty()) return "zero";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [p, c] : h.terms()) {
    os << (first ? "" : " ") << p.str() << ':' << c;
    first = false;
  }
  return os.str();
}

namespace detail {

inline std::optional<LocalHamiltonian> load_hamiltonian(const std::string& path,
                                                        const std::string& text,
                                                        const char* what) {
  std::optional<int> none;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw ParseError(std::string("cannot open ") + what + " file '" + path + "'");
    try {
      return read_hamiltonian(is, none, none);
    } catch (const ParseError& e) {
      throw ParseError(std::string(what) + " file '" + path + "': " + e.what());
    }
  }
  if (!text.empty()) return parse_hamiltonian(text, none, none);
  return std::nullopt;
}

inline LocalHamiltonian require_hamiltonian(const std::string& path, const std::string& text,
                                            const char* what, const std::string& battery) {
  auto h = load_hamiltonian(path, text, what);
  if (!h) throw InvalidArgument(battery + ": --" + what + " <file> is required");
  return *h;
}

inline int max_term_weight(const LocalHamiltonian& h) {
  int w = 1;
  for (const auto& [p, c] : h.terms()) w = std::max(w, p.weight());
  return w;
}

/// Resolves (n, k) from the config and the given Hamiltonians and lifts
/// them all to locality k.
inline void resolve_dims(const ExperimentConfig& cfg, std::vector<LocalHamiltonian*> hs, int& n,
                         int& k) {
  n = cfg.n > 0 ? cfg.n : hs.front()->qubits();
  k = cfg.k;
  for (auto* h : hs) {
    if (h->qubits() != n) {
      throw DimensionError("Hamiltonian has " + std::to_string(h->qubits()) +
                           " qubits, expected n=" + std::to_string(n));
    }
    if (cfg.k == 0) k = std::max(k, max_term_weight(*h));
  }
  if (k < 1 || k > n) throw InvalidArgument("need 1 <= k <= n");
  for (auto* h : hs) {
    if (max_term_weight(*h) > k) {
      throw InvalidArgument("Hamiltonian has terms of weight above k=" + std::to_string(k));
    }
    *h = h->with_locality(k);
  }
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string classify(double distance, double close_radius, double far_radius) {
  const double tol = 1e-12;
  if (distance <= close_radius * (1.0 + tol) + tol) return "close";
  if (distance >= far_radius * (1.0 - tol)) return "far";
  return "gap";
}

inline Json correctness(Decision d, const std::string& truth) {
  if (truth == "gap") return nullptr;
  return (d == Decision::Far) == (truth == "far");
}

inline double num(const Json& v) { return v.is_null() ? 0.0 : v.get<double>(); }

/// Success counts over records whose `correct` field is set.
inline void success_aggregates(const std::vector<Json>& records, Json& agg) {
  std::uint64_t labelled = 0, ok = 0, far = 0;
  for (const auto& r : records) {
    const auto c = r.find("correct");
    if (c != r.end() && !c->is_null()) {
      ++labelled;
      ok += c->get<bool>();
    }
    const auto d = r.find("decision");
    if (d != r.end() && d->is_string()) far += d->get<std::string>() == "FAR";
  }
  const Interval w = wilson_interval(ok, labelled);
  agg["trials"] = records.size();
  agg["labelled"] = labelled;
  agg["successes"] = ok;
  agg["success_rate"] = labelled ? static_cast<double>(ok) / static_cast<double>(labelled) : 0.0;
  agg["wilson_low"] = w.low;
  agg["wilson_high"] = w.high;
  agg["far_rate"] =
      records.empty() ? 0.0 : static_cast<double>(far) / static_cast<double>(records.size());
}

inline double column_sum(const std::vector<Json>& records, const char* key) {
  double s = 0.0;
  for (const auto& r : records) s += num(r.at(key));
  return s;
}

inline std::uint64_t column_sum_u64(const std::vector<Json>& records, const char* key) {
  std::uint64_t s = 0;
  for (const auto& r : records) s += r.at(key).get<std::uint64_t>();
  return s;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return make_rng({seed, trial})();
}

inline ShadowSource* make_source(bool exact, const DenseOperator& rho,
                                 std::unique_ptr<ShadowSource>& holder) {
  if (exact) holder = std::make_unique<ExactShadowSource>(rho);
  else holder = std::make_unique<SampledShadowSource>(rho, SamplingMode::Aggregated);
  return holder.get();
}

}  // namespace detail

/**
 * Aggregates derived from the per-trial records alone, so that they can be
 * recomputed from a parsed CSV.
 */
inline Json aggregate_records(const std::string& battery, const std::vector<Json>& records,
                              const ExperimentConfig& cfg) {
  using namespace detail;
  Json agg = Json::object();
  if (battery == "certify-dynamics") {
    success_aggregates(records, agg);
    const double total = column_sum(records, "total_evolution_time");
    agg["total_evolution_time_sum"] = total;
    agg["total_evolution_time_mean"] =
        records.empty() ? 0.0 : total / static_cast<double>(records.size());
    agg["queries_sum"] = column_sum_u64(records, "queries");
  } else if (battery == "learn-gibbs") {
    success_aggregates(records, agg);
    std::uint64_t recovered = 0;
    double worst = 0.0;
    for (const auto& r : records) {
      recovered += r.at("recovered").get<bool>();
      worst = std::max(worst, num(r.at("trace_distance")));
    }
    agg["recovered"] = recovered;
    agg["recovery_rate"] =
        records.empty() ? 0.0 : static_cast<double>(recovered) / static_cast<double>(records.size());
    agg["max_trace_distance"] = worst;
    agg["copies_sum"] = column_sum_u64(records, "copies");
  } else if (battery == "certify-gibbs") {
    success_aggregates(records, agg);
    agg["copies_sum"] = 2 * column_sum_u64(records, "copies_per_state");
  } else if (battery == "verify-invariants") {
    std::uint64_t violations = 0, failed = 0, evaluations = 0;
    for (const auto& r : records) {
      violations += r.at("violations").get<std::uint64_t>();
      evaluations += r.at("evaluations").get<std::uint64_t>();
      failed += !r.at("passed").get<bool>();
    }
    agg["checks"] = records.size();
    agg["evaluations"] = evaluations;
    agg["violations"] = violations;
    agg["failed_checks"] = failed;
  } else if (battery == "bench") {
    std::vector<double> xs, ys;
    Json points = Json::array();
    for (double eps : cfg.bench_eps) {
      double sum = 0.0;
      std::uint64_t count = 0;
      for (const auto& r : records) {
        if (r.at("eps").get<double>() == eps) {
          sum += num(r.at("total_evolution_time"));
          ++count;
        }
      }
      const double mean = count ? sum / static_cast<double>(count) : 0.0;
      points.push_back({{"eps", eps}, {"trials", count}, {"mean_total_evolution_time", mean}});
      if (count && mean > 0.0) {
        xs.push_back(eps);
        ys.push_back(mean);
      }
    }
    agg["scaling"] = points;
    agg["time_exponent"] = xs.size() >= 2 ? Json(loglog_slope(xs, ys)) : Json(nullptr);
  } else {
    throw InvalidArgument("unknown battery '" + battery + "'");
  }
  return agg;
}

/*******************************************************************************
 * Batteries
 ******************************************************************************/

namespace detail {

inline void add_success_check(Report& r, double target) {
  if (r.aggregates.at("labelled").get<std::uint64_t>() == 0) return;
  r.checks.push_back(
      Check::make("success_rate", r.aggregates.at("success_rate").get<double>(), ">=", target));
}

inline Report run_certify_dynamics(const ExperimentConfig& cfg) {
  const std::string name = "certify-dynamics";
  LocalHamiltonian h0 = require_hamiltonian(cfg.h0, cfg.h0_text, "h0", name);
  LocalHamiltonian h = require_hamiltonian(cfg.h, cfg.h_text, "h", name);
  int n = 0, k = 0;
  resolve_dims(cfg, {&h0, &h}, n, k);

  CertificationConfig base;
  base.eps = cfg.eps.value_or(0.5);
  base.n = n;
  base.k = k;
  base.repetitions = cfg.repetitions;
  base.c_op = cfg.c_op;
  base.trotter_constant = cfg.trotter_constant;
  base.noise.spam_budget = cfg.spam;
  base.noise.mode = cfg.spam > 0.0 ? noise_mode_from_string(cfg.spam_mode) : NoiseMode::None;
  base.validate();
  const int runs = cfg.delta ? amplification_runs(*cfg.delta) : 1;

  const double distance = (h - h0).coefficient_norm();
  const std::string truth = classify(distance, base.close_radius(), base.eps);

  Report r;
  r.inputs = {{"h0", to_text(h0)},
              {"h", to_text(h)},
              {"n", n},
              {"k", k},
              {"eps", base.eps},
              {"distance", distance},
              {"truth", truth},
              {"close_radius", base.close_radius()},
              {"far_radius", base.eps},
              {"trotter_tolerance", base.trotter_tolerance()},
              {"estimate_accuracy", base.estimate_accuracy()},
              {"decision_threshold", base.decision_threshold()},
              {"shots_per_estimate", base.shots_per_estimate()},
              {"noise_mode", to_string(base.noise.mode)},
              {"amplification_runs", runs}};
  r.columns = {"trial", "seed", "decision", "truth", "correct", "far_votes", "runs",
               "iterations", "min_estimate", "target_time", "reference_time",
               "total_evolution_time", "queries", "time_resolution"};

  r.records = parallel_map<Json>(cfg.trials, cfg.jobs, [&](std::uint64_t i) {
    CertificationConfig c = base;
    c.seed = trial_seed(cfg.seed, i);
    EvolutionOracle oracle(h);
    std::vector<Verdict> verdicts;
    Decision decision;
    int far_votes;
    Ledger ledger;
    if (runs > 1) {
      AmplifiedVerdict a = certify_amplified(h0, oracle, c, *cfg.delta);
      decision = a.decision;
      far_votes = a.far_votes;
      ledger = a.ledger;
      verdicts = std::move(a.runs);
    } else {
      Verdict v = certify(h0, oracle, c);
      decision = v.decision;
      far_votes = v.decision == Decision::Far;
      ledger = v.ledger;
      verdicts.push_back(std::move(v));
    }
    std::uint64_t iterations = 0;
    double min_estimate = std::numeric_limits<double>::infinity();
    for (const auto& v : verdicts) {
      iterations += v.transcript.size();
      for (const auto& it : v.transcript) min_estimate = std::min(min_estimate, it.estimate);
    }
    return Json{{"trial", i},
                {"seed", c.seed},
                {"decision", to_string(decision)},
                {"truth", truth},
                {"correct", correctness(decision, truth)},
                {"far_votes", far_votes},
                {"runs", runs},
                {"iterations", iterations},
                {"min_estimate", finite_or_null(min_estimate)},
                {"target_time", ledger.target_evolution_time},
                {"reference_time", ledger.reference_evolution_time},
                {"total_evolution_time", ledger.total_evolution_time()},
                {"queries", ledger.query_count()},
                {"time_resolution", finite_or_null(ledger.time_resolution)}};
  });
  r.aggregates = aggregate_records(name, r.records, cfg);
  add_success_check(r, cfg.target);

  if (cfg.trotter_exact_check) {
    // Simulator-side audit at the longest sampled time.
    const double t = base.max_time();
    Json audit = {{"t", t}, {"tolerance", base.trotter_tolerance()}};
    try {
      const TrotterStepChoice s =
          trotter_steps_checked(h, h0, base.c_op, t, base.trotter_tolerance(), base.trotter_constant);
      audit["analytic_steps"] = s.analytic_steps;
      audit["analytic_error"] = s.analytic_error;
      audit["doubling_steps"] = s.steps;
      audit["doubling_error"] = s.measured_error;
      r.checks.push_back(
          Check::make("trotter_analytic_error", s.analytic_error, "<=", base.trotter_tolerance()));
    } catch (const Error& e) {
      audit["error"] = e.what();
      r.checks.push_back(Check::make("trotter_analytic_error",
                                     std::numeric_limits<double>::infinity(), "<=",
                                     base.trotter_tolerance()));
    }
    r.inputs["trotter_check"] = audit;
  }
  return r;
}

inline Report run_learn_gibbs(const ExperimentConfig& cfg) {
  const std::string name = "learn-gibbs";
  LocalHamiltonian h = require_hamiltonian(cfg.h, cfg.h_text, "h", name);
  int n = 0, k = 0;
  resolve_dims(cfg, {&h}, n, k);

  LearnConfig base;
  base.n = n;
  base.k = k;
  base.beta = cfg.beta;
  base.eps = cfg.eps.value_or(0.2);
  base.delta = cfg.delta.value_or(0.1);
  base.net_spacing = cfg.net_spacing;
  base.copies_override = cfg.copies_override;
  base.guarantee_factor = cfg.guarantee_factor;
  base.validate();
  const NetIndex net = base.net();
  const std::uint64_t net_size = net.size(base.net_cap);
  const GibbsState truth = gibbs_state(h, cfg.beta);

  Report r;
  r.inputs = {{"h", to_text(h)},
              {"n", n},
              {"k", k},
              {"beta", base.beta},
              {"eps", base.eps},
              {"delta", base.delta},
              {"bounded", h.is_bounded()},
              {"eta", finite_or_null(net.eta())},
              {"net_size", net_size},
              {"per_pauli_accuracy", base.per_pauli_accuracy()},
              {"required_copies", base.required_copies()},
              {"guarantee", base.guarantee()},
              {"exact", cfg.exact}};
  r.columns = {"trial", "seed", "index", "learned", "trace_distance", "guarantee", "correct",
               "recovered", "objective", "copies", "max_estimate_error"};

  r.records = parallel_map<Json>(cfg.trials, cfg.jobs, [&](std::uint64_t i) {
    LearnConfig c = base;
    c.seed = trial_seed(cfg.seed, i);
    std::unique_ptr<ShadowSource> holder;
    ShadowSource* src = make_source(cfg.exact, truth.rho, holder);
    const LearnResult res = learn_gibbs(*src, c);
    const double td = trace_distance(res.state.rho, truth.rho);
    return Json{{"trial", i},
                {"seed", c.seed},
                {"index", res.index},
                {"learned", compact_hamiltonian(res.hamiltonian)},
                {"trace_distance", td},
                {"guarantee", res.guarantee},
                {"correct", td <= res.guarantee},
                {"recovered", (res.hamiltonian - h).coefficient_norm() <= 1e-9},
                {"objective", res.objective},
                {"copies", res.copies},
                {"max_estimate_error", max_shadow_error(res.shadow, truth.rho)}};
  });
  r.aggregates = aggregate_records(name, r.records, cfg);
  add_success_check(r, cfg.target);
  return r;
}

inline Report run_certify_gibbs(const ExperimentConfig& cfg) {
  const std::string name = "certify-gibbs";
  LocalHamiltonian h0 = require_hamiltonian(cfg.h0, cfg.h0_text, "h0", name);
  LocalHamiltonian h = require_hamiltonian(cfg.h, cfg.h_text, "h", name);
  int n = 0, k = 0;
  resolve_dims(cfg, {&h0, &h}, n, k);

  GibbsCertifyConfig base;
  base.n = n;
  base.k = k;
  base.beta = cfg.beta;
  base.eps = cfg.eps.value_or(0.5);
  base.delta = cfg.delta.value_or(0.05);
  base.copies_override = cfg.copies_override;
  base.validate();
  const GibbsState rho = gibbs_state(h, cfg.beta);
  const GibbsState rho0 = gibbs_state(h0, cfg.beta);
  const double distance = trace_distance(rho.rho, rho0.rho);
  const double close_radius = cfg.beta > 0.0 ? base.close_radius() : 0.0;
  const std::string truth = classify(distance, close_radius, base.far_radius());

  Report r;
  r.inputs = {{"h0", to_text(h0)},
              {"h", to_text(h)},
              {"n", n},
              {"k", k},
              {"beta", base.beta},
              {"eps", base.eps},
              {"delta", base.delta},
              {"trace_distance", distance},
              {"truth", truth},
              {"close_radius", close_radius},
              {"far_radius", base.far_radius()},
              {"threshold", base.beta > 0.0 ? base.threshold() : 0.0},
              {"required_copies_per_state", base.beta > 0.0 ? base.required_copies() : 0},
              {"exact", cfg.exact}};
  r.columns = {"trial", "seed", "decision", "truth", "correct", "max_gap", "witness",
               "threshold", "copies_per_state"};

  r.records = parallel_map<Json>(cfg.trials, cfg.jobs, [&](std::uint64_t i) {
    GibbsCertifyConfig c = base;
    c.seed = trial_seed(cfg.seed, i);
    std::unique_ptr<ShadowSource> ha, hb;
    ShadowSource* a = make_source(cfg.exact, rho.rho, ha);
    ShadowSource* b = make_source(cfg.exact, rho0.rho, hb);
    const GibbsVerdict v = certify_gibbs(*a, *b, c);
    return Json{{"trial", i},
                {"seed", c.seed},
                {"decision", to_string(v.decision)},
                {"truth", truth},
                {"correct", correctness(v.decision, truth)},
                {"max_gap", v.max_gap},
                {"witness", v.witness ? Json(v.witness->str()) : Json(nullptr)},
                {"threshold", v.threshold},
                {"copies_per_state", v.copies_per_state}};
  });
  r.aggregates = aggregate_records(name, r.records, cfg);
  add_success_check(r, cfg.target);
  return r;
}

inline Report run_verify_invariants(const ExperimentConfig& cfg) {
  const std::string name = "verify-invariants";
  if (cfg.n <= 0 || cfg.k <= 0) throw InvalidArgument(name + ": --n and --k are required");
  check_lemma_dims(cfg.n, cfg.k);
  LemmaSuiteOptions opt;
  opt.t_draws = cfg.t_draws;
  const auto parts = parallel_map<LemmaReport>(cfg.samples, cfg.jobs, [&](std::uint64_t i) {
    LemmaReport part;
    check_lemma_sample(i, cfg.n, cfg.k, cfg.seed, opt, part);
    return part;
  });
  LemmaReport merged;
  for (const auto& p : parts) merge_lemma_reports(merged, p);

  Report r;
  r.inputs = {{"n", cfg.n}, {"k", cfg.k}, {"instances", merged.instances},
              {"t_draws", opt.t_draws}, {"statistical_slack", opt.statistical_slack},
              {"numeric_slack", opt.numeric_slack}};
  r.columns = {"check", "evaluations", "violations", "worst_margin", "passed"};
  for (const auto& c : merged.checks) {
    r.records.push_back(Json{{"check", c.name},
                             {"evaluations", c.evaluations},
                             {"violations", c.violations},
                             {"worst_margin", finite_or_null(c.worst_margin)},
                             {"passed", c.passed()}});
    r.checks.push_back(
        Check::make(c.name + "_violations", static_cast<double>(c.violations), "==", 0.0));
  }
  r.aggregates = aggregate_records(name, r.records, cfg);
  return r;
}

inline Report run_bench(const ExperimentConfig& cfg) {
  const std::string name = "bench";
  auto h0_opt = load_hamiltonian(cfg.h0, cfg.h0_text, "h0");
  const int n_default = cfg.n > 0 ? cfg.n : 2;
  const int k_default = cfg.k > 0 ? cfg.k : 1;
  LocalHamiltonian h0 =
      h0_opt ? *h0_opt
             : random_local_hamiltonian(n_default, k_default, 1.0, 1.0, make_rng({cfg.seed, 0xBE})());
  LocalHamiltonian h = load_hamiltonian(cfg.h, cfg.h_text, "h").value_or(h0);
  int n = 0, k = 0;
  resolve_dims(cfg, {&h0, &h}, n, k);
  if (cfg.bench_eps.size() < 2) throw InvalidArgument("bench: need two or more eps values");

  Report r;
  r.inputs = {{"h0", to_text(h0)}, {"h", to_text(h)}, {"n", n}, {"k", k},
              {"distance", (h - h0).coefficient_norm()}};
  r.columns = {"eps", "trial", "seed", "decision", "iterations", "total_evolution_time",
               "queries"};
  const std::uint64_t per = cfg.trials;
  const std::uint64_t total = per * cfg.bench_eps.size();
  r.records = parallel_map<Json>(total, cfg.jobs, [&](std::uint64_t idx) {
    const std::uint64_t e = idx / per, i = idx % per;
    CertificationConfig c;
    c.eps = cfg.bench_eps[e];
    c.n = n;
    c.k = k;
    c.repetitions = cfg.repetitions;
    c.c_op = cfg.c_op;
    c.trotter_constant = cfg.trotter_constant;
    c.seed = make_rng({cfg.seed, e, i})();
    EvolutionOracle oracle(h);
    const Verdict v = certify(h0, oracle, c);
    return Json{{"eps", c.eps},
                {"trial", i},
                {"seed", c.seed},
                {"decision", to_string(v.decision)},
                {"iterations", v.transcript.size()},
                {"total_evolution_time", v.ledger.total_evolution_time()},
                {"queries", v.ledger.query_count()}};
  });
  r.aggregates = aggregate_records(name, r.records, cfg);
  const Json& slope = r.aggregates.at("time_exponent");
  const double s = slope.is_null() ? std::nan("") : slope.get<double>();
  r.checks.push_back(Check::make("time_exponent_low", s, ">=", -1.15));
  r.checks.push_back(Check::make("time_exponent_high", s, "<=", -0.85));

  if (cfg.calibrate_shadows) {
    const ShadowCalibration cal = calibrate_shadow_constant();
    Json curve = Json::array();
    double frozen_rate = 0.0;
    for (const auto& [c, rate] : cal.curve) {
      curve.push_back({{"constant", c}, {"rate", rate}});
      if (std::abs(c - kShadowCopyConstant) < 1e-9) frozen_rate = rate;
    }
    r.aggregates["shadow_calibration"] = {{"curve", curve},
                                          {"constant", finite_or_null(cal.constant)},
                                          {"frozen_constant", kShadowCopyConstant}};
    r.checks.push_back(Check::make("frozen_shadow_constant_rate", frozen_rate, ">=", 0.95));
  }
  return r;
}

}  // namespace detail

/// Runs the configured battery. Throws on malformed configuration.
inline Report run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.target >= 0.0 && cfg.target <= 1.0)) {
    throw InvalidArgument("target success rate must be in [0, 1]");
  }
  Report r;
  if (cfg.subcommand == "certify-dynamics") r = detail::run_certify_dynamics(cfg);
  else if (cfg.subcommand == "learn-gibbs") r = detail::run_learn_gibbs(cfg);
  else if (cfg.subcommand == "certify-gibbs") r = detail::run_certify_gibbs(cfg);
  else if (cfg.subcommand == "verify-invariants") r = detail::run_verify_invariants(cfg);
  else if (cfg.subcommand == "bench") r = detail::run_bench(cfg);
  else throw InvalidArgument("unknown subcommand '" + cfg.subcommand + "'");
  r.battery = cfg.subcommand;
  r.config = config_to_json(cfg);
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline void write_report(const Report& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write report '" + path + "'");
  os << r.to_json().dump(2) << '\n';
}

inline void write_csv(const Report& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write csv '" + path + "'");
  emit_csv(r, os);
}

}  // namespace hamcert
