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

#ifndef MBREG_PROTOCOL_HPP_
#define MBREG_PROTOCOL_HPP_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mbreg/message.hpp"
#include "mbreg/types.hpp"

// Server and client state machines of the round-based register. Every phase
// is a pure function from (state, inputs) to (state, outputs).

namespace mbreg {

struct ServerState {
  ServerId id;
  Value value;
  /// Echoed values of this round, at most one per sending server.
  std::map<ServerId, Value> echo_vals;
  /// Write requests of this round, at most one per client.
  std::map<ClientId, Value> current_writes;
  /// Readers waiting for a reply in the next send phase.
  std::set<ClientId> current_reads;
  bool cured = false;

  friend bool operator==(const ServerState&, const ServerState&) = default;
};

ServerState MakeServer(ServerId id);

struct WriteConfirmation {
  friend constexpr bool operator==(WriteConfirmation,
                                   WriteConfirmation) = default;
};

struct ReadReturn {
  Value value;
  friend constexpr bool operator==(ReadReturn, ReadReturn) = default;
};

/// A read that completed its reply round without exactly one value backed by
/// the threshold number of distinct servers. Only expected in inadmissible
/// configurations; surfaced as a protocol failure, never retried.
struct ReadFailure {
  std::map<ServerId, Value> replies;
  int threshold = 0;
  /// Values reaching the threshold (zero or several).
  std::vector<Value> qualifying;

  std::map<Value, int> Tally() const;
  friend bool operator==(const ReadFailure&, const ReadFailure&) = default;
};

using Response = std::variant<WriteConfirmation, ReadReturn, ReadFailure>;

struct PhaseOutput {
  std::vector<Outgoing> outgoing;
  /// Set only by the compute phase.
  std::optional<Response> response;
  friend bool operator==(const PhaseOutput&, const PhaseOutput&) = default;
};

// ---------------------------------------------------------------------------
// Server

ServerState ServerBeginRound(ServerState state, bool cured_report);

std::pair<ServerState, PhaseOutput> ServerSend(ServerState state, Round round);

/// Accumulates the round's inbox. Each sender contributes at most one entry
/// per message kind; a sender that delivers conflicting payloads of one kind
/// in the same round is discarded for that kind. This makes the result
/// independent of inbox order.
ServerState ServerReceive(ServerState state, std::span<const Inbound> inbox);

enum class ComputeSource { kUnchanged, kWrite, kEcho };

struct ServerComputeResult {
  ServerState state;
  ComputeSource source = ComputeSource::kUnchanged;
  /// Several values reached the echo threshold; the smallest one was kept.
  bool echo_tie = false;
};

ServerComputeResult ServerComputeDetailed(ServerState state, int threshold);

inline ServerState ServerCompute(ServerState state, int threshold) {
  return ServerComputeDetailed(std::move(state), threshold).state;
}

// ---------------------------------------------------------------------------
// Client

struct ClientState {
  ClientId id;
  std::vector<Message> to_send;
  bool reading = false;
  bool writing = false;
  std::optional<Round> op_start;
  std::map<ServerId, Value> replies;
  std::optional<Value> pending_value;

  bool idle() const { return !reading && !writing; }
  friend bool operator==(const ClientState&, const ClientState&) = default;
};

ClientState MakeClient(ClientId id);

/// Throws UsageError if an operation is already in progress.
ClientState ClientInvokeWrite(ClientState state, Value v);
ClientState ClientInvokeRead(ClientState state);

std::pair<ClientState, PhaseOutput> ClientSend(ClientState state, Round round);

/// Replies are only collected in the reply round of a pending read (the
/// round after the request was sent); anything else is unsolicited.
ClientState ClientReceive(ClientState state, Round round,
                          std::span<const Inbound> inbox);

std::pair<ClientState, std::optional<Response>> ClientCompute(
    ClientState state, Round round, int threshold);

/// Values supported by at least `threshold` distinct servers, ascending.
std::vector<Value> QualifyingValues(const std::map<ServerId, Value>& votes,
                                    int threshold);

}  // namespace mbreg

#endif  // MBREG_PROTOCOL_HPP_
