/*
 * Copyright (c) 2026, The mbreg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mbreg/checker.hpp"
#include "mbreg/errors.hpp"
#include "mbreg/experiment.hpp"

namespace {

using namespace mbreg;

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelId ModelOrThrow(const std::string& text) {
  auto m = ParseModel(text);
  if (!m) throw ConfigError("unknown model \"" + text + "\"");
  return *m;
}

Strategy StrategyOrThrow(const std::string& text) {
  auto k = ParseStrategyKind(text);
  if (!k || *k == Strategy::Kind::kScripted) {
    throw ConfigError("unknown adversary \"" + text +
                      "\" (scripted schedules go in the config file)");
  }
  return Strategy::Of(*k);
}

// "1-10" or "3" or "1,4,9".
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw ConfigError("empty seed range " + part);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list \"" + text + "\"");
    }
  }
  return out;
}

struct RunFlags {
  std::string config_path;
  std::string model;
  int n = 0;
  int f = 0;
  Round rounds = 0;
  std::uint64_t seed = 0;
  int clients = 0;
  std::string workload;
  std::string adversary;
  std::string trace_out, history_out, report_out, verdict_out;
  bool check = true;
  int jobs = 1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Round-based register under mobile Byzantine agents"};
  app.require_subcommand(1);

  // ---- run
  RunFlags rf;
  auto* run = app.add_subcommand("run", "Simulate one configuration and check the history");
  run->add_option("--config", rf.config_path, "JSON experiment document");
  auto* o_model = run->add_option("--model", rf.model, "garay|bonnet|sasaki|buhrman or M1..M4");
  auto* o_n = run->add_option("--n", rf.n, "Number of servers");
  auto* o_f = run->add_option("--f", rf.f, "Number of mobile agents");
  auto* o_rounds = run->add_option("--rounds", rf.rounds, "Rounds to simulate");
  auto* o_seed = run->add_option("--seed", rf.seed, "RNG seed");
  auto* o_clients = run->add_option("--clients", rf.clients, "Number of clients");
  auto* o_workload = run->add_option(
      "--workload", rf.workload, "random, none, or a JSON directive file");
  auto* o_adv = run->add_option(
      "--adversary", rf.adversary, "none|stationary|sweep|random_walk|split_vote");
  auto* o_allow = run->add_flag("--allow-inadmissible", "Permit n <= alpha*f");
  auto* o_trace = run->add_option("--trace-out", rf.trace_out, "Trace JSONL path");
  auto* o_hist = run->add_option("--history-out", rf.history_out, "History JSONL path");
  auto* o_report = run->add_option("--report-out", rf.report_out, "Probe report path");
  auto* o_verdict = run->add_option("--verdict-out", rf.verdict_out, "Verdicts path");
  auto* o_check = run->add_flag("--check,!--no-check", rf.check, "Run the history checker");
  auto* o_jobs = run->add_option("--jobs", rf.jobs, "Worker threads (sweep only)");

  // ---- tightness
  std::string t_model = "all";
  int t_f = 2;
  std::string t_json, t_trace;
  auto* tight = app.add_subcommand(
      "tightness", "Replay the split-vote construction at n = alpha*f");
  tight->add_option("--model", t_model, "A model or \"all\"");
  tight->add_option("--f", t_f, "Number of agents");
  auto* o_tjson = tight->add_option("--json-out", t_json, "Structured report (single model)");
  auto* o_ttrace = tight->add_option("--trace-out", t_trace, "Trace JSONL (single model)");

  // ---- sweep
  std::vector<std::string> s_models{"M1", "M2", "M3", "M4"};
  std::vector<int> s_fs{1, 2, 3};
  std::string s_seeds = "1-10";
  std::string s_adv = "random_walk";
  std::string s_out;
  SweepSpec spec;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of models, f and seeds");
  sweep->add_option("--models", s_models, "Models")->delimiter(',');
  sweep->add_option("--fs", s_fs, "Values of f")->delimiter(',');
  sweep->add_option("--seeds", s_seeds, "Seeds, e.g. 1-10 or 1,5,7");
  sweep->add_option("--n-offset", spec.n_offset, "n = alpha*f + offset");
  sweep->add_option("--rounds", spec.rounds, "Rounds per run");
  sweep->add_option("--clients", spec.clients, "Clients per run");
  sweep->add_option("--adversary", s_adv, "Adversary strategy");
  sweep->add_option("--jobs", spec.jobs, "Worker threads");
  auto* o_sout = sweep->add_option("--out", s_out, "Write the TSV table here");

  // ---- check
  std::string c_history, c_verdicts;
  bool c_brute = false;
  auto* check = app.add_subcommand("check", "Check a recorded history file");
  check->add_option("history", c_history, "History JSONL")->required();
  auto* o_cverdict = check->add_option("--verdict-out", c_verdicts, "Verdicts path");
  check->add_flag("--brute-force", c_brute,
                  "Cross-check with exhaustive search (small histories)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run) {
      ExperimentConfig config;
      if (!rf.config_path.empty()) {
        MergeExperimentConfig(Slurp(rf.config_path), config);
      }
      if (*o_model) config.model = ModelOrThrow(rf.model);
      if (*o_n) config.n = rf.n;
      if (*o_f) config.f = rf.f;
      if (*o_rounds) config.rounds = rf.rounds;
      if (*o_seed) config.seed = rf.seed;
      if (*o_clients) config.clients = rf.clients;
      if (*o_workload) {
        if (rf.workload == "random") {
          config.workload.kind = WorkloadSpec::Kind::kRandom;
        } else if (rf.workload == "none") {
          config.workload.kind = WorkloadSpec::Kind::kNone;
        } else {
          config.workload.kind = WorkloadSpec::Kind::kExplicit;
          config.workload.directives = ParseWorkload(Slurp(rf.workload));
        }
      }
      if (*o_adv) config.adversary = StrategyOrThrow(rf.adversary);
      if (*o_allow) config.allow_inadmissible = true;
      if (*o_trace) config.out.trace = rf.trace_out;
      if (*o_hist) config.out.history = rf.history_out;
      if (*o_report) config.out.report = rf.report_out;
      if (*o_verdict) config.out.verdicts = rf.verdict_out;
      if (*o_check) config.check = rf.check;
      if (*o_jobs) config.jobs = rf.jobs;
      return CmdRun(config, std::cout);
    }

    if (*tight) {
      std::vector<ModelId> models;
      if (t_model == "all") {
        models.assign(kAllModels.begin(), kAllModels.end());
      } else {
        models.push_back(ModelOrThrow(t_model));
      }
      if (models.size() > 1 && (*o_tjson || *o_ttrace)) {
        throw ConfigError("--json-out and --trace-out need a single --model");
      }
      int worst = kExitOk;
      for (ModelId m : models) {
        const int code = CmdTightness(
            m, t_f, std::cout,
            *o_tjson ? std::optional<std::string>(t_json) : std::nullopt,
            *o_ttrace ? std::optional<std::string>(t_trace) : std::nullopt);
        worst = std::max(worst, code);
      }
      return worst;
    }

    if (*sweep) {
      for (const auto& m : s_models) spec.models.push_back(ModelOrThrow(m));
      spec.fs = s_fs;
      spec.seeds = ParseSeeds(s_seeds);
      spec.adversary = StrategyOrThrow(s_adv);
      return CmdSweep(spec, std::cout,
                      *o_sout ? std::optional<std::string>(s_out) : std::nullopt);
    }

    if (*check) {
      std::ifstream in(c_history);
      if (!in) throw ConfigError("cannot read " + c_history);
      const History history = ReadHistoryJsonl(in);
      std::vector<Verdict> verdicts = CheckAll(history);
      if (c_brute) {
        if (auto bf = BruteForceLinearizable(history)) {
          verdicts.push_back(*bf);
        } else {
          std::cout << "brute force: skipped, more than " << kBruteForceMaxOps
                    << " operations\n";
        }
      }
      bool ok = true;
      for (const auto& v : verdicts) {
        ok = ok && v.passed;
        std::cout << v.property << ": " << (v.passed ? "ok" : "VIOLATED");
        if (!v.passed) {
          std::cout << " - " << v.detail << " [witness:";
          for (int id : v.witness) std::cout << " op" << id;
          std::cout << "]";
        }
        std::cout << "\n";
      }
      if (*o_cverdict) {
        std::ofstream out(c_verdicts);
        if (!out) throw ConfigError("cannot write " + c_verdicts);
        out << VerdictsToJson(verdicts) << "\n";
      }
      return ok ? kExitOk : kExitViolation;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const CheckerInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
