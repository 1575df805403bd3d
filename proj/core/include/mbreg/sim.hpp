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

#ifndef MBREG_SIM_HPP_
#define MBREG_SIM_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mbreg/adversary.hpp"
#include "mbreg/history.hpp"
#include "mbreg/model_params.hpp"
#include "mbreg/protocol.hpp"
#include "mbreg/trace.hpp"
#include "mbreg/workload.hpp"

namespace mbreg {

struct SimOptions {
  SystemConfig config;
  int clients = 3;
  Round rounds = 0;
  std::uint64_t seed = 0;
  Strategy strategy;
  Workload workload;
  /// Required to run with n <= alpha * f.
  bool allow_inadmissible = false;
  /// Re-run every receive/compute with a permuted inbox and record a
  /// violation if the end state differs.
  bool verify_inbox_permutation = false;
  /// Optional; not owned.
  TraceSink* trace = nullptr;
};

/// Runtime invariant breaches. Kinds:
///   agreement           fewer than n - f non-faulty servers share a value
///   faulty_bound        more than f servers occupied
///   m4_honest_send      a server free at the start of an M4 send phase did
///                       not send honestly
///   round_local         a delivery crossed a round boundary
///   reliable_delivery   delivered messages differ from accepted sends
///   inbox_permutation   a permuted inbox changed an end-of-round state
///   protocol_failure    a read found no unique backed value
struct Violation {
  Round round = 0;
  std::string kind;
  std::string detail;
};

struct RoundProbe {
  Round round = 0;
  Value modal;
  int support = 0;
  int non_faulty = 0;
  int faulty = 0;
  int cured = 0;
  /// Pending readers discarded by silent cured servers this round.
  int dropped_reads = 0;
  /// Forged messages rejected by the network this round.
  int rejected = 0;
};

struct ReadFailureEvent {
  Round round = 0;
  ClientId client;
  int op_id = 0;
  ReadFailure failure;
  int servers = 0;

  int silent() const {
    return servers - static_cast<int>(failure.replies.size());
  }
};

struct ProbeReport {
  std::vector<RoundProbe> rounds;
  std::vector<Violation> violations;
  std::vector<ReadFailureEvent> read_failures;
  int echo_ties = 0;

  /// Smallest agreement support over all probed rounds.
  int MinSupport() const;
  int CountViolations(std::string_view kind) const;
};

struct SimResult {
  History history;
  ProbeReport probes;
  FaultSchedule schedule;
  std::vector<ServerState> final_servers;
  int threshold = 0;
  bool admissible = true;
};

/// Runs rounds 1..options.rounds. Round 0 is the initial state (bottom
/// everywhere) and is probed before the first round. Throws ConfigError on
/// an invalid configuration, strategy or workload before anything runs.
SimResult Run(const SimOptions& options);

/// The checks Run performs before the first round, including a dry run of
/// scripted agent placements. Throws ConfigError.
void ValidateSimOptions(const SimOptions& options);

struct Agreement {
  Value modal;
  int support = 0;
};

/// Most common value among servers whose status is not kFaulty; ties go to
/// the smallest value.
Agreement ProbeAgreement(std::span<const ServerState> servers,
                         std::span<const FaultStatus> statuses);

/// JSON summary of a probe report.
std::string ProbeReportToJson(const ProbeReport& report, const SimResult& sim,
                              const SimOptions& options);

// ---------------------------------------------------------------------------
// Resilience-boundary demonstrations

struct TightnessReport {
  ModelId model = ModelId::kGaray;
  int f = 0;
  int n = 0;
  int threshold = 0;
  Value written;
  Value lie;
  Round read_round = 0;
  std::map<Value, int> reply_tally;
  int silent = 0;
  int written_support = 0;
  int lie_support = 0;
  /// Top two values share the maximal distinct-sender support.
  bool ambiguous = false;
  bool protocol_failure = false;
  SimResult sim;
};

/// Runs the split-vote construction at n = alpha * f: one write, one read,
/// and an agent schedule that leaves the reader with two equally backed
/// values.
TightnessReport TightnessDemo(ModelId model, int f, TraceSink* trace = nullptr);

/// The options TightnessDemo runs with.
SimOptions TightnessOptions(ModelId model, int f);

std::string FormatTightnessReport(const TightnessReport& report);
std::string TightnessReportToJson(const TightnessReport& report);

}  // namespace mbreg

#endif  // MBREG_SIM_HPP_
