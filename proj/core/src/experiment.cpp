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

#include "mbreg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json ParseJson(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void RejectUnknown(const json& obj, std::initializer_list<std::string_view> keys,
                   const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T Get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("\"" + key + "\" has the wrong type");
  }
}

ServerId ParseServer(const json& j) {
  if (j.is_number_integer()) return ServerId{j.get<int>()};
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.size() > 1 && (s[0] == 's' || s[0] == 'S')) {
      try {
        return ServerId{std::stoi(s.substr(1))};
      } catch (const std::exception&) {
      }
    }
  }
  throw ConfigError("bad server id " + j.dump());
}

Strategy ParseStrategy(const json& j) {
  if (j.is_string()) {
    auto kind = ParseStrategyKind(j.get<std::string>());
    if (!kind) throw ConfigError("unknown adversary \"" + j.get<std::string>() + "\"");
    if (*kind == Strategy::Kind::kScripted) {
      throw ConfigError("a scripted adversary needs an object with \"script\"");
    }
    return Strategy::Of(*kind);
  }
  if (!j.is_object()) throw ConfigError("\"adversary\" must be a string or object");
  RejectUnknown(j, {"kind", "lie", "policy", "script"}, "adversary");
  Strategy st = Strategy::Of(Strategy::Kind::kRandomWalk);
  if (j.contains("kind")) {
    const auto name = Get<std::string>(j["kind"], "kind");
    auto kind = ParseStrategyKind(name);
    if (!kind) throw ConfigError("unknown adversary \"" + name + "\"");
    st.kind = *kind;
  }
  if (j.contains("lie")) st.lie = Value::Of(Get<std::int64_t>(j["lie"], "lie"));
  if (j.contains("policy")) {
    auto p = ParsePolicy(Get<std::string>(j["policy"], "policy"));
    if (!p) throw ConfigError("unknown policy " + j["policy"].dump());
    st.scripted_policy = *p;
  }
  if (j.contains("script")) {
    if (st.kind != Strategy::Kind::kScripted) {
      throw ConfigError("\"script\" requires \"kind\": \"scripted\"");
    }
    if (!j["script"].is_array()) throw ConfigError("\"script\" must be an array");
    for (const auto& step : j["script"]) {
      if (!step.is_object()) throw ConfigError("script entries must be objects");
      RejectUnknown(step, {"round", "occupied", "moves"}, "script entry");
      if (!step.contains("round")) throw ConfigError("script entry without \"round\"");
      const Round r = Get<Round>(step["round"], "round");
      ScriptedRound sr;
      if (step.contains("occupied")) {
        std::set<ServerId> occ;
        for (const auto& s : step["occupied"]) occ.insert(ParseServer(s));
        sr.occupied = occ;
      }
      if (step.contains("moves")) {
        for (const auto& mv : step["moves"]) {
          if (!mv.is_array() || mv.size() != 2) {
            throw ConfigError("a move is a [from, to] pair");
          }
          sr.moves.push_back({ParseServer(mv[0]), ParseServer(mv[1])});
        }
      }
      st.script[r] = sr;
    }
  }
  return st;
}

void ParseWorkloadSpec(const json& j, WorkloadSpec& spec) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "random") {
      spec.kind = WorkloadSpec::Kind::kRandom;
    } else if (s == "none") {
      spec.kind = WorkloadSpec::Kind::kNone;
    } else {
      throw ConfigError("unknown workload \"" + s + "\"");
    }
    return;
  }
  if (j.is_array()) {
    spec.kind = WorkloadSpec::Kind::kExplicit;
    spec.directives = ParseWorkload(j.dump());
    return;
  }
  if (!j.is_object()) throw ConfigError("\"workload\" must be a string, array or object");
  RejectUnknown(j,
                {"kind", "op_probability", "read_ratio", "max_writers_per_round",
                 "crash_probability", "directives"},
                "workload");
  if (j.contains("kind")) ParseWorkloadSpec(j["kind"], spec);
  auto& p = spec.random;
  if (j.contains("op_probability")) p.op_probability = Get<double>(j["op_probability"], "op_probability");
  if (j.contains("read_ratio")) p.read_ratio = Get<double>(j["read_ratio"], "read_ratio");
  if (j.contains("max_writers_per_round")) {
    p.max_writers_per_round = Get<int>(j["max_writers_per_round"], "max_writers_per_round");
  }
  if (j.contains("crash_probability")) {
    p.crash_probability = Get<double>(j["crash_probability"], "crash_probability");
  }
  if (j.contains("directives")) {
    spec.kind = WorkloadSpec::Kind::kExplicit;
    spec.directives = ParseWorkload(j["directives"].dump());
  }
}

bool WriteFile(const std::string& path, const std::string& content,
               std::ostream& log) {
  std::ofstream out(path);
  if (!out) {
    log << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return static_cast<bool>(out);
}

void CheckProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  ExperimentConfig config;
  MergeExperimentConfig(text, config);
  return config;
}

void MergeExperimentConfig(std::string_view text, ExperimentConfig& c) {
  const json j = ParseJson(text, "config");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RejectUnknown(j,
                {"model", "n", "f", "rounds", "seed", "clients", "workload",
                 "adversary", "allow_inadmissible", "check", "out", "jobs"},
                "config");
  if (j.contains("model")) {
    const auto name = Get<std::string>(j["model"], "model");
    auto m = ParseModel(name);
    if (!m) throw ConfigError("unknown model \"" + name + "\"");
    c.model = *m;
  }
  if (j.contains("n")) c.n = Get<int>(j["n"], "n");
  if (j.contains("f")) c.f = Get<int>(j["f"], "f");
  if (j.contains("rounds")) c.rounds = Get<Round>(j["rounds"], "rounds");
  if (j.contains("seed")) c.seed = Get<std::uint64_t>(j["seed"], "seed");
  if (j.contains("clients")) c.clients = Get<int>(j["clients"], "clients");
  if (j.contains("workload")) ParseWorkloadSpec(j["workload"], c.workload);
  if (j.contains("adversary")) c.adversary = ParseStrategy(j["adversary"]);
  if (j.contains("allow_inadmissible")) {
    c.allow_inadmissible = Get<bool>(j["allow_inadmissible"], "allow_inadmissible");
  }
  if (j.contains("check")) c.check = Get<bool>(j["check"], "check");
  if (j.contains("jobs")) c.jobs = Get<int>(j["jobs"], "jobs");
  if (j.contains("out")) {
    const auto& o = j["out"];
    if (!o.is_object()) throw ConfigError("\"out\" must be an object");
    RejectUnknown(o, {"trace", "history", "report", "verdicts"}, "out");
    if (o.contains("trace")) c.out.trace = Get<std::string>(o["trace"], "out.trace");
    if (o.contains("history")) c.out.history = Get<std::string>(o["history"], "out.history");
    if (o.contains("report")) c.out.report = Get<std::string>(o["report"], "out.report");
    if (o.contains("verdicts")) c.out.verdicts = Get<std::string>(o["verdicts"], "out.verdicts");
  }
}

Workload ParseWorkload(std::string_view text) {
  const json j = ParseJson(text, "workload");
  if (!j.is_array()) throw ConfigError("workload must be a JSON array");
  Workload w;
  for (const auto& d : j) {
    if (!d.is_object()) throw ConfigError("workload entries must be objects");
    RejectUnknown(d, {"round", "client", "op", "value"}, "workload entry");
    for (const char* key : {"round", "client", "op"}) {
      if (!d.contains(key)) {
        throw ConfigError(std::string("workload entry without \"") + key + "\"");
      }
    }
    Directive dir;
    dir.round = Get<Round>(d["round"], "round");
    dir.client = ClientId{Get<int>(d["client"], "client")};
    const auto op = Get<std::string>(d["op"], "op");
    if (op == "write") {
      dir.kind = Directive::Kind::kWrite;
      if (!d.contains("value")) throw ConfigError("write directive without \"value\"");
      dir.value = Value::Of(Get<std::int64_t>(d["value"], "value"));
    } else if (op == "read") {
      dir.kind = Directive::Kind::kRead;
    } else if (op == "crash") {
      dir.kind = Directive::Kind::kCrash;
    } else {
      throw ConfigError("unknown op \"" + op + "\"");
    }
    if (dir.kind != Directive::Kind::kWrite && d.contains("value")) {
      throw ConfigError("only write directives carry a value");
    }
    w.directives.push_back(dir);
  }
  return w;
}

void ValidateExperimentConfig(const ExperimentConfig& c) {
  const SystemConfig sys = MakeConfig(c.model, c.n, c.f);
  sys.Validate();
  if (c.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (c.clients < 1) throw ConfigError("clients must be >= 1");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  CheckProbability(c.workload.random.op_probability, "op_probability");
  CheckProbability(c.workload.random.read_ratio, "read_ratio");
  CheckProbability(c.workload.random.crash_probability, "crash_probability");
  if (c.workload.random.max_writers_per_round < 0) {
    throw ConfigError("max_writers_per_round must be >= 0");
  }
  if (!sys.admissible() && !c.allow_inadmissible) {
    sys.threshold();
  }
  ValidateStrategy(c.adversary, c.model, c.n, c.f);
  if (c.workload.kind == WorkloadSpec::Kind::kExplicit) {
    ValidateWorkload(c.workload.directives, c.clients, c.rounds);
  }
  ValidateSimOptions(MakeSimOptions(c));
}

SimOptions MakeSimOptions(const ExperimentConfig& c) {
  SimOptions opt;
  opt.config = MakeConfig(c.model, c.n, c.f);
  opt.clients = c.clients;
  opt.rounds = c.rounds;
  opt.seed = c.seed;
  opt.strategy = c.adversary;
  opt.allow_inadmissible = c.allow_inadmissible;
  switch (c.workload.kind) {
    case WorkloadSpec::Kind::kNone:
      break;
    case WorkloadSpec::Kind::kRandom:
      opt.workload = GenerateRandomWorkload(c.clients, c.rounds, c.seed,
                                            c.workload.random);
      break;
    case WorkloadSpec::Kind::kExplicit:
      opt.workload = c.workload.directives;
      break;
  }
  return opt;
}

RunOutcome ExecuteRun(const ExperimentConfig& config, TraceSink* trace) {
  ValidateExperimentConfig(config);
  SimOptions opt = MakeSimOptions(config);
  opt.trace = trace;
  RunOutcome outcome;
  outcome.sim = Run(opt);
  outcome.admissible = outcome.sim.admissible;
  if (config.check) {
    outcome.verdicts = {CheckTermination(outcome.sim.history, opt.workload),
                        CheckValidity(outcome.sim.history),
                        CheckOrdering(outcome.sim.history)};
  }
  outcome.violated = !outcome.sim.probes.violations.empty() ||
                     std::any_of(outcome.verdicts.begin(), outcome.verdicts.end(),
                                 [](const Verdict& v) { return !v.passed; });
  return outcome;
}

std::string VerdictsToJson(const std::vector<Verdict>& verdicts) {
  ordered_json j;
  ordered_json list = ordered_json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    all = all && v.passed;
    list.push_back({{"property", v.property},
                    {"passed", v.passed},
                    {"witness", v.witness},
                    {"detail", v.detail}});
  }
  j["all_passed"] = all;
  j["verdicts"] = list;
  return j.dump(2);
}

int CmdRun(const ExperimentConfig& config, std::ostream& log) {
  try {
    ValidateExperimentConfig(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::ofstream trace_file;
  std::unique_ptr<StreamTraceSink> sink;
  if (!config.out.trace.empty()) {
    trace_file.open(config.out.trace);
    if (!trace_file) {
      log << "config error: cannot write " << config.out.trace << "\n";
      return kExitConfigError;
    }
    sink = std::make_unique<StreamTraceSink>(trace_file);
  }

  RunOutcome outcome;
  try {
    outcome = ExecuteRun(config, sink.get());
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  trace_file.close();

  const SimOptions opt = MakeSimOptions(config);
  bool io_ok = true;
  if (!config.out.history.empty()) {
    std::ostringstream h;
    WriteHistoryJsonl(h, outcome.sim.history);
    io_ok &= WriteFile(config.out.history, h.str(), log);
  }
  if (!config.out.report.empty()) {
    io_ok &= WriteFile(config.out.report,
                       ProbeReportToJson(outcome.sim.probes, outcome.sim, opt) + "\n",
                       log);
  }
  if (!config.out.verdicts.empty()) {
    io_ok &= WriteFile(config.out.verdicts, VerdictsToJson(outcome.verdicts) + "\n",
                       log);
  }

  const auto& probes = outcome.sim.probes;
  log << ModelLabel(config.model) << " (" << ModelName(config.model)
      << ") n=" << config.n << " f=" << config.f
      << " threshold=" << outcome.sim.threshold << " rounds=" << config.rounds
      << " seed=" << config.seed
      << (outcome.admissible ? "" : " [inadmissible]") << "\n";
  log << "operations: " << outcome.sim.history.operations.size()
      << ", min agreement support " << probes.MinSupport() << " (need "
      << config.n - config.f << "), runtime violations "
      << probes.violations.size() << ", failed reads "
      << probes.read_failures.size() << "\n";
  for (const auto& v : outcome.verdicts) {
    log << v.property << ": " << (v.passed ? "ok" : "VIOLATED");
    if (!v.passed) log << " - " << v.detail;
    log << "\n";
  }
  if (!io_ok) return kExitConfigError;
  return outcome.exit_code();
}

int CmdTightness(ModelId model, int f, std::ostream& log,
                 const std::optional<std::string>& json_out,
                 const std::optional<std::string>& trace_out) {
  if (f < 1) {
    log << "config error: the construction needs f >= 1\n";
    return kExitConfigError;
  }
  std::ofstream trace_file;
  std::unique_ptr<StreamTraceSink> sink;
  if (trace_out) {
    trace_file.open(*trace_out);
    if (!trace_file) {
      log << "config error: cannot write " << *trace_out << "\n";
      return kExitConfigError;
    }
    sink = std::make_unique<StreamTraceSink>(trace_file);
  }
  const TightnessReport report = TightnessDemo(model, f, sink.get());
  log << FormatTightnessReport(report);
  if (json_out && !WriteFile(*json_out, TightnessReportToJson(report) + "\n", log)) {
    return kExitConfigError;
  }
  return report.ambiguous && report.protocol_failure ? kExitOk : kExitViolation;
}

std::vector<SweepCell> RunSweep(const SweepSpec& spec) {
  if (spec.models.empty() || spec.fs.empty() || spec.seeds.empty()) {
    throw UsageError("sweep needs at least one model, f and seed");
  }
  struct Job {
    ModelId model;
    int f;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (ModelId m : spec.models) {
    for (int f : spec.fs) {
      for (std::uint64_t seed : spec.seeds) jobs.push_back({m, f, seed});
    }
  }
  std::vector<SweepCell> cells(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        ExperimentConfig c;
        c.model = job.model;
        c.f = job.f;
        c.n = Lookup(job.model).alpha * job.f + spec.n_offset;
        c.rounds = spec.rounds;
        c.seed = job.seed;
        c.clients = spec.clients;
        c.workload = spec.workload;
        c.adversary = spec.adversary;
        c.allow_inadmissible = true;
        HashingTraceSink sink;
        const RunOutcome out = ExecuteRun(c, &sink);
        SweepCell& cell = cells[i];
        cell.model = job.model;
        cell.f = job.f;
        cell.n = c.n;
        cell.seed = job.seed;
        cell.admissible = out.admissible;
        for (const auto& v : out.verdicts) {
          if (v.property == "termination") cell.termination = v.passed;
          if (v.property == "validity") cell.validity = v.passed;
          if (v.property == "ordering") cell.ordering = v.passed;
        }
        cell.min_support = out.sim.probes.MinSupport();
        cell.agreement_violations = out.sim.probes.CountViolations("agreement");
        cell.read_failures = static_cast<int>(out.sim.probes.read_failures.size());
        for (const auto& op : out.sim.history.operations) {
          (op.kind == OpKind::kRead ? cell.reads : cell.writes)++;
        }
        cell.trace_digest = sink.digest();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(spec.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return cells;
}

std::string FormatSweepTable(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "model\tf\tn\tseed\tadmissible\ttermination\tvalidity\tordering\t"
         "min_support\trequired\tagreement_violations\tread_failures\treads\t"
         "writes\ttrace_digest\n";
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  for (const auto& c : cells) {
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(c.trace_digest));
    out << ModelLabel(c.model) << '\t' << c.f << '\t' << c.n << '\t' << c.seed
        << '\t' << yn(c.admissible) << '\t' << yn(c.termination) << '\t'
        << yn(c.validity) << '\t' << yn(c.ordering) << '\t' << c.min_support
        << '\t' << c.n - c.f << '\t' << c.agreement_violations << '\t'
        << c.read_failures << '\t' << c.reads << '\t' << c.writes << '\t'
        << digest << '\n';
  }
  return out.str();
}

int CmdSweep(const SweepSpec& spec, std::ostream& log,
             const std::optional<std::string>& table_out) {
  std::vector<SweepCell> cells;
  try {
    cells = RunSweep(spec);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const UsageError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const std::string table = FormatSweepTable(cells);
  if (table_out) {
    if (!WriteFile(*table_out, table, log)) return kExitConfigError;
  } else {
    log << table;
  }
  const bool bad = std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) {
    return c.admissible && (!c.termination || !c.validity || !c.ordering ||
                            c.agreement_violations > 0 || c.read_failures > 0);
  });
  return bad ? kExitViolation : kExitOk;
}

}  // namespace mbreg
