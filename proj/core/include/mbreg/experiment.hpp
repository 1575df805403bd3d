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

#ifndef MBREG_EXPERIMENT_HPP_
#define MBREG_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mbreg/adversary.hpp"
#include "mbreg/checker.hpp"
#include "mbreg/model_params.hpp"
#include "mbreg/sim.hpp"
#include "mbreg/workload.hpp"

namespace mbreg {

/// Process exit codes of the experiment runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitConfigError = 2,
};

struct WorkloadSpec {
  enum class Kind { kNone, kRandom, kExplicit };
  Kind kind = Kind::kRandom;
  RandomWorkloadParams random;
  Workload directives;
};

struct OutputPaths {
  std::string trace = "trace.jsonl";
  std::string history = "history.jsonl";
  std::string report = "report.json";
  std::string verdicts = "verdicts.json";
};

struct ExperimentConfig {
  ModelId model = ModelId::kGaray;
  int n = 4;
  int f = 1;
  Round rounds = 100;
  std::uint64_t seed = 1;
  int clients = 3;
  WorkloadSpec workload;
  Strategy adversary = Strategy::Of(Strategy::Kind::kRandomWalk);
  bool allow_inadmissible = false;
  bool check = true;
  OutputPaths out;
  int jobs = 1;
};

/// Parses the JSON experiment document. Unknown keys are rejected. Throws
/// ConfigError.
ExperimentConfig ParseExperimentConfig(std::string_view text);
/// Applies the keys present in `text` on top of `base`.
void MergeExperimentConfig(std::string_view text, ExperimentConfig& base);

/// Reads the explicit directive list: a JSON array of
/// {"round","client","op":"write"|"read"|"crash","value"?}.
Workload ParseWorkload(std::string_view text);

/// Structural and admissibility checks. Throws ConfigError.
void ValidateExperimentConfig(const ExperimentConfig& config);

SimOptions MakeSimOptions(const ExperimentConfig& config);

struct RunOutcome {
  SimResult sim;
  std::vector<Verdict> verdicts;
  bool admissible = true;
  /// Any checker verdict failed or any runtime invariant was violated.
  bool violated = false;

  int exit_code() const {
    return admissible && violated ? kExitViolation : kExitOk;
  }
};

RunOutcome ExecuteRun(const ExperimentConfig& config,
                      TraceSink* trace = nullptr);

std::string VerdictsToJson(const std::vector<Verdict>& verdicts);

/// Validates, runs, and writes the four artifacts (trace, history, probe
/// report, verdicts). Nothing is written when the configuration is invalid.
int CmdRun(const ExperimentConfig& config, std::ostream& log);

/// Writes the human-readable report to `log` and the structured one to
/// `json_out` when given.
int CmdTightness(ModelId model, int f, std::ostream& log,
                 const std::optional<std::string>& json_out,
                 const std::optional<std::string>& trace_out);

struct SweepSpec {
  std::vector<ModelId> models;
  std::vector<int> fs;
  std::vector<std::uint64_t> seeds;
  /// n = alpha * f + n_offset.
  int n_offset = 1;
  Round rounds = 300;
  int clients = 3;
  WorkloadSpec workload;
  Strategy adversary = Strategy::Of(Strategy::Kind::kRandomWalk);
  int jobs = 1;
};

struct SweepCell {
  ModelId model = ModelId::kGaray;
  int f = 0;
  int n = 0;
  std::uint64_t seed = 0;
  bool admissible = true;
  bool termination = true;
  bool validity = true;
  bool ordering = true;
  int min_support = 0;
  int agreement_violations = 0;
  int read_failures = 0;
  int reads = 0;
  int writes = 0;
  std::uint64_t trace_digest = 0;
};

/// Throws UsageError on an empty model, f or seed list.
std::vector<SweepCell> RunSweep(const SweepSpec& spec);
/// Tab-separated table with a header row.
std::string FormatSweepTable(const std::vector<SweepCell>& cells);
int CmdSweep(const SweepSpec& spec, std::ostream& log,
             const std::optional<std::string>& table_out);

}  // namespace mbreg

#endif  // MBREG_EXPERIMENT_HPP_
