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

#include "mbreg/protocol.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

// Folds one (sender, value) vote into `votes`. A sender that votes twice
// with different values loses its vote for the rest of the fold.
template <class Key>
void FoldVote(std::map<Key, Value>& votes, std::set<Key>& conflicted, Key key,
              Value v) {
  if (conflicted.count(key)) return;
  auto [it, inserted] = votes.emplace(key, v);
  if (!inserted && it->second != v) {
    votes.erase(it);
    conflicted.insert(key);
  }
}

}  // namespace

std::map<Value, int> ReadFailure::Tally() const {
  std::map<Value, int> tally;
  for (const auto& [server, v] : replies) ++tally[v];
  return tally;
}

std::vector<Value> QualifyingValues(const std::map<ServerId, Value>& votes,
                                    int threshold) {
  std::map<Value, int> count;
  for (const auto& [server, v] : votes) ++count[v];
  // A value has to be present to be selected, whatever the threshold.
  const int needed = std::max(threshold, 1);
  std::vector<Value> out;
  for (const auto& [v, c] : count) {
    if (c >= needed) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Server

ServerState MakeServer(ServerId id) {
  ServerState s;
  s.id = id;
  return s;
}

ServerState ServerBeginRound(ServerState state, bool cured_report) {
  state.echo_vals.clear();
  state.current_writes.clear();
  state.cured = cured_report;
  return state;
}

std::pair<ServerState, PhaseOutput> ServerSend(ServerState state,
                                               Round /*round*/) {
  PhaseOutput out;
  if (!state.cured) {
    out.outgoing.push_back(
        {Destination::AllServers(), EchoMsg{state.value, state.id}});
    for (ClientId reader : state.current_reads) {
      out.outgoing.push_back(
          {Destination::To(reader), ReplyMsg{state.value, state.id}});
    }
  }
  // Cleared on both branches: a cured server forgets its pending readers.
  state.current_reads.clear();
  return {std::move(state), std::move(out)};
}

ServerState ServerReceive(ServerState state, std::span<const Inbound> inbox) {
  std::set<ServerId> echo_conflicts;
  std::set<ClientId> write_conflicts;
  for (const auto& in : inbox) {
    if (ClaimedSender(in.msg) != in.sender) continue;  // unauthenticated
    if (const auto* echo = std::get_if<EchoMsg>(&in.msg)) {
      FoldVote(state.echo_vals, echo_conflicts, echo->server, echo->value);
    } else if (const auto* write = std::get_if<WriteMsg>(&in.msg)) {
      FoldVote(state.current_writes, write_conflicts, write->client,
               write->value);
    } else if (const auto* read = std::get_if<ReadMsg>(&in.msg)) {
      state.current_reads.insert(read->client);
    }
  }
  return state;
}

ServerComputeResult ServerComputeDetailed(ServerState state, int threshold) {
  ServerComputeResult result;
  if (!state.current_writes.empty()) {
    // Highest client id wins; every non-faulty server sees the same set.
    state.value = state.current_writes.rbegin()->second;
    result.source = ComputeSource::kWrite;
  } else {
    auto qualifying = QualifyingValues(state.echo_vals, threshold);
    if (!qualifying.empty()) {
      state.value = qualifying.front();
      result.source = ComputeSource::kEcho;
      result.echo_tie = qualifying.size() > 1;
    }
  }
  result.state = std::move(state);
  return result;
}

// ---------------------------------------------------------------------------
// Client

ClientState MakeClient(ClientId id) {
  ClientState c;
  c.id = id;
  return c;
}

ClientState ClientInvokeWrite(ClientState state, Value v) {
  if (!state.idle()) {
    throw UsageError(ToString(state.id) +
                     ": write invoked while an operation is in progress");
  }
  state.to_send.push_back(WriteMsg{v, state.id});
  state.writing = true;
  state.pending_value = v;
  return state;
}

ClientState ClientInvokeRead(ClientState state) {
  if (!state.idle()) {
    throw UsageError(ToString(state.id) +
                     ": read invoked while an operation is in progress");
  }
  state.to_send.push_back(ReadMsg{state.id});
  state.reading = true;
  return state;
}

std::pair<ClientState, PhaseOutput> ClientSend(ClientState state,
                                               Round round) {
  PhaseOutput out;
  for (auto& m : state.to_send) {
    out.outgoing.push_back({Destination::AllServers(), std::move(m)});
  }
  state.to_send.clear();
  // Only stamped while an operation is open, and only once, so a read keeps
  // its request round across both of its rounds.
  if (!state.idle() && !state.op_start) state.op_start = round;
  return {std::move(state), std::move(out)};
}

ClientState ClientReceive(ClientState state, Round round,
                          std::span<const Inbound> inbox) {
  if (!state.reading || !state.op_start || *state.op_start != round - 1) {
    return state;
  }
  std::set<ServerId> conflicts;
  for (const auto& in : inbox) {
    if (ClaimedSender(in.msg) != in.sender) continue;
    if (const auto* reply = std::get_if<ReplyMsg>(&in.msg)) {
      FoldVote(state.replies, conflicts, reply->server, reply->value);
    }
  }
  return state;
}

std::pair<ClientState, std::optional<Response>> ClientCompute(
    ClientState state, Round round, int threshold) {
  if (state.writing && state.op_start == round) {
    state.writing = false;
    state.op_start.reset();
    state.pending_value.reset();
    return {std::move(state), Response{WriteConfirmation{}}};
  }
  if (state.reading && state.op_start && *state.op_start == round - 1) {
    state.reading = false;
    state.op_start.reset();
    auto qualifying = QualifyingValues(state.replies, threshold);
    std::optional<Response> response;
    if (qualifying.size() == 1) {
      response = ReadReturn{qualifying.front()};
    } else {
      response = ReadFailure{state.replies, threshold, std::move(qualifying)};
    }
    state.replies.clear();
    return {std::move(state), std::move(response)};
  }
  return {std::move(state), std::nullopt};
}

}  // namespace mbreg
