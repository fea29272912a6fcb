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

// hamcert: seeded experiment batteries for Hamiltonian certification.
//
//   hamcert certify-dynamics --h0 a.txt --h b.txt --eps 0.5 --trials 100
//   hamcert verify-invariants --n 3 --k 2 --samples 500 --seed 7
//   hamcert learn-gibbs --config run.json --seed 4
//
// Flags given on the command line override the --config file. Exit status
// is 0 when every declared check passes, 1 when one fails, 2 on errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hamcert/harness.hpp"

namespace {

using hamcert::ExperimentConfig;

const char* describe(const std::string& battery) {
  if (battery == "certify-dynamics") return "certify H against H0 from time-evolution access";
  if (battery == "learn-gibbs") return "learn a Gibbs state's Hamiltonian over a covering net";
  if (battery == "certify-gibbs") return "certify a Gibbs state against a reference state";
  if (battery == "verify-invariants") return "sweep the dynamics inequalities on random instances";
  return "evolution-time scaling in eps, optional shadow calibration";
}

// Scans argv for --config before the real parse, so that file values become
// the defaults the flags then override.
std::optional<std::string> find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

struct OptionalFlags {
  double eps = 0.0;
  double delta = 0.0;
  double net_spacing = 0.0;
  std::uint64_t copies_override = 0;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* net_spacing_opt = nullptr;
  CLI::Option* copies_opt = nullptr;

  void apply(ExperimentConfig& cfg) const {
    if (eps_opt->count()) cfg.eps = eps;
    if (delta_opt->count()) cfg.delta = delta;
    if (net_spacing_opt->count()) cfg.net_spacing = net_spacing;
    if (copies_opt->count()) cfg.copies_override = copies_override;
  }
};

void add_flags(CLI::App* sub, ExperimentConfig& cfg, OptionalFlags& opt, std::string& config_path) {
  sub->set_help_flag("--help", "print this help");  // --h names the Hamiltonian file
  sub->add_option("--config", config_path, "JSON file mirroring these flags");
  sub->add_option("--seed", cfg.seed, "master seed");
  sub->add_option("--trials", cfg.trials, "number of seeded trials");
  sub->add_option("--jobs", cfg.jobs, "worker threads, 0 = all cores");
  sub->add_option("--out", cfg.out, "report JSON path");
  sub->add_option("--csv", cfg.csv, "per-trial CSV path");
  sub->add_option("--h", cfg.h, "Hamiltonian file (hidden target or Gibbs source)");
  sub->add_option("--h0", cfg.h0, "reference Hamiltonian file");
  sub->add_option("--n", cfg.n, "qubits");
  sub->add_option("--k", cfg.k, "locality");
  opt.eps_opt = sub->add_option("--eps", opt.eps, "tolerance");
  opt.delta_opt = sub->add_option("--delta", opt.delta, "failure probability");
  sub->add_option("--beta", cfg.beta, "inverse temperature");
  sub->add_option("--spam", cfg.spam, "SPAM shift budget on identity-probability estimates");
  sub->add_option("--spam-mode", cfg.spam_mode,
                  "random, adversarial-low, adversarial-high or none");
  sub->add_option("--c-op", cfg.c_op, "operator-norm bound used for Trotter step counts");
  sub->add_option("--repetitions", cfg.repetitions, "outer iterations per certification run");
  sub->add_option("--trotter-constant", cfg.trotter_constant, "Trotter step-count constant");
  sub->add_flag("--trotter-exact-check", cfg.trotter_exact_check,
                "audit the analytic Trotter step count against the simulator");
  opt.net_spacing_opt = sub->add_option("--net-spacing", opt.net_spacing, "coarse net spacing");
  opt.copies_opt =
      sub->add_option("--copies-override", opt.copies_override, "copies (may only raise)");
  sub->add_option("--guarantee-factor", cfg.guarantee_factor, "learning guarantee multiple of eps");
  sub->add_flag("--exact", cfg.exact, "use exact expectations instead of sampled shadows");
  sub->add_option("--samples", cfg.samples, "instances for verify-invariants");
  sub->add_option("--t-draws", cfg.t_draws, "time draws per instance");
  sub->add_option("--bench-eps", cfg.bench_eps, "eps values for the scaling bench");
  sub->add_flag("--calibrate-shadows", cfg.calibrate_shadows, "rerun the shadow calibration");
  sub->add_option("--target", cfg.target, "declared success-rate threshold");
}

void print_summary(const hamcert::Report& r) {
  std::cout << r.battery << ": " << r.records.size() << " records in " << r.wall_clock_seconds
            << " s\n";
  std::cout << "aggregates " << r.aggregates.dump() << "\n";
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.op << ' '
              << c.threshold << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  std::string config_path;
  try {
    if (auto path = find_config_path(argc, argv)) cfg = hamcert::load_config(*path, cfg);
  } catch (const hamcert::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Seeded experiment batteries for Hamiltonian certification"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(0, 1);
  std::vector<OptionalFlags> opts(hamcert::battery_names().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < hamcert::battery_names().size(); ++i) {
    CLI::App* sub = app.add_subcommand(hamcert::battery_names()[i],
                                      describe(hamcert::battery_names()[i]));
    add_flags(sub, cfg, opts[i], config_path);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      cfg.subcommand = subs[i]->get_name();
      opts[i].apply(cfg);
    }
  }
  if (cfg.subcommand.empty()) {
    std::cerr << "error: no subcommand given\n" << app.help();
    return 2;
  }

  try {
    const hamcert::Report report = hamcert::run(cfg);
    if (!cfg.out.empty()) hamcert::write_report(report, cfg.out);
    if (!cfg.csv.empty()) hamcert::write_csv(report, cfg.csv);
    print_summary(report);
    return report.passed() ? 0 : 1;
  } catch (const hamcert::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
