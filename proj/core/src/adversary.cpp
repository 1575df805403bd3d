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

#include "mbreg/adversary.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

std::set<ServerId> FirstServers(int n, int count) {
  std::set<ServerId> out;
  for (int i = 1; i <= std::min(n, count); ++i) out.insert(ServerId{i});
  return out;
}

// The `f` servers following the highest occupied one, wrapping around.
std::set<ServerId> SweepNext(const std::set<ServerId>& prev, int n, int f) {
  if (prev.empty()) return FirstServers(n, f);
  const int start = prev.rbegin()->index % n;
  std::set<ServerId> out;
  for (int k = 0; k < std::min(n, f); ++k) {
    out.insert(ServerId{(start + k) % n + 1});
  }
  return out;
}

std::set<ServerId> RandomSubset(Rng& rng, int n, int count) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::set<ServerId> out;
  for (int i = 0; i < std::min(n, count); ++i) out.insert(ServerId{ids[i]});
  return out;
}

std::string Describe(const std::set<ServerId>& set) {
  std::string out = "{";
  for (ServerId s : set) {
    if (out.size() > 1) out += ",";
    out += ToString(s);
  }
  return out + "}";
}

void CheckInRange(ServerId s, int n) {
  if (s.index < 1 || s.index > n) {
    throw ConfigError("scripted schedule names unknown server " + ToString(s));
  }
}

// Pairs agents leaving `from` with free targets in `to`, in id order.
std::vector<Movement> PairMoves(const std::set<ServerId>& from,
                                const std::set<ServerId>& to) {
  std::vector<ServerId> leaving, arriving;
  std::set_difference(from.begin(), from.end(), to.begin(), to.end(),
                      std::back_inserter(leaving));
  std::set_difference(to.begin(), to.end(), from.begin(), from.end(),
                      std::back_inserter(arriving));
  std::vector<Movement> moves;
  for (std::size_t i = 0; i < std::min(leaving.size(), arriving.size()); ++i) {
    moves.push_back({leaving[i], arriving[i]});
  }
  return moves;
}

void ValidateMoves(const std::set<ServerId>& pre,
                   const std::vector<Movement>& moves, int n) {
  std::set<ServerId> sources, targets;
  for (const auto& m : moves) {
    CheckInRange(m.from, n);
    CheckInRange(m.to, n);
    if (!pre.count(m.from)) {
      throw ConfigError("movement from " + ToString(m.from) +
                        " which hosts no agent");
    }
    if (!sources.insert(m.from).second || !targets.insert(m.to).second) {
      throw ConfigError("two agents share a movement endpoint");
    }
  }
  for (ServerId t : targets) {
    if (pre.count(t) && !sources.count(t)) {
      throw ConfigError("movement onto " + ToString(t) +
                        " which already hosts an agent");
    }
  }
}

Value PickObserved(Rng& rng, std::span<const Value> observed) {
  if (observed.empty()) return Value::Bottom();
  return observed[rng.UniformInt(0, static_cast<std::int64_t>(observed.size()) - 1)];
}

Message WithValue(const Message& msg, Value v) {
  Message out = msg;
  std::visit(
      [v](auto& m) {
        if constexpr (requires { m.value; }) m.value = v;
      },
      out);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::set<ServerId> RoundOccupancy::PostSend() const {
  std::set<ServerId> out = pre_send;
  for (const auto& m : moves) out.erase(m.from);
  for (const auto& m : moves) out.insert(m.to);
  return out;
}

std::set<ServerId> RoundOccupancy::Vacated() const {
  std::set<ServerId> post = PostSend();
  std::set<ServerId> out;
  for (const auto& m : moves) {
    if (!post.count(m.from)) out.insert(m.from);
  }
  return out;
}

MessagePolicy Strategy::policy() const {
  switch (kind) {
    case Kind::kNone:
      return MessagePolicy::kNone;
    case Kind::kStationary:
    case Kind::kSweep:
      return MessagePolicy::kLie;
    case Kind::kRandomWalk:
      return MessagePolicy::kRandom;
    case Kind::kSplitVote:
      return MessagePolicy::kSplitVote;
    case Kind::kScripted:
      return scripted_policy;
  }
  return MessagePolicy::kNone;
}

std::string_view StrategyName(Strategy::Kind kind) {
  switch (kind) {
    case Strategy::Kind::kNone:
      return "none";
    case Strategy::Kind::kStationary:
      return "stationary";
    case Strategy::Kind::kSweep:
      return "sweep";
    case Strategy::Kind::kRandomWalk:
      return "random_walk";
    case Strategy::Kind::kSplitVote:
      return "split_vote";
    case Strategy::Kind::kScripted:
      return "scripted";
  }
  return "unknown";
}

std::optional<Strategy::Kind> ParseStrategyKind(std::string_view text) {
  if (text == "random") return Strategy::Kind::kRandomWalk;
  for (auto k : {Strategy::Kind::kNone, Strategy::Kind::kStationary,
                 Strategy::Kind::kSweep, Strategy::Kind::kRandomWalk,
                 Strategy::Kind::kSplitVote, Strategy::Kind::kScripted}) {
    if (text == StrategyName(k)) return k;
  }
  return std::nullopt;
}

std::string_view PolicyName(MessagePolicy policy) {
  switch (policy) {
    case MessagePolicy::kNone:
      return "none";
    case MessagePolicy::kLie:
      return "lie";
    case MessagePolicy::kSplitVote:
      return "split_vote";
    case MessagePolicy::kRandom:
      return "random";
  }
  return "unknown";
}

std::optional<MessagePolicy> ParsePolicy(std::string_view text) {
  for (auto p : {MessagePolicy::kNone, MessagePolicy::kLie,
                 MessagePolicy::kSplitVote, MessagePolicy::kRandom}) {
    if (text == PolicyName(p)) return p;
  }
  return std::nullopt;
}

void ValidateStrategy(const Strategy& strategy, ModelId model, int n, int f) {
  if (strategy.kind != Strategy::Kind::kScripted) return;
  for (const auto& [round, step] : strategy.script) {
    if (round < 1) throw ConfigError("scripted rounds start at 1");
    if (step.occupied) {
      for (ServerId s : *step.occupied) CheckInRange(s, n);
      if (static_cast<int>(step.occupied->size()) > f) {
        throw ConfigError("scripted round " + std::to_string(round) +
                          " occupies " + Describe(*step.occupied) +
                          ", more than f=" + std::to_string(f) + " servers");
      }
    }
    if (!step.moves.empty() && model != ModelId::kBuhrman) {
      throw ConfigError(
          "send-phase movements only exist in the buhrman model");
    }
  }
}

// ---------------------------------------------------------------------------

void FaultSchedule::Record(Round round, RoundOccupancy occupancy) {
  rounds_[round] = std::move(occupancy);
}

void FaultSchedule::RecordUnrestored(Round round, std::set<ServerId> servers) {
  unrestored_[round] = std::move(servers);
}

const RoundOccupancy* FaultSchedule::At(Round round) const {
  auto it = rounds_.find(round);
  return it == rounds_.end() ? nullptr : &it->second;
}

std::set<ServerId> FaultSchedule::FaultyAtSend(Round round) const {
  const auto* occ = At(round);
  return occ ? occ->pre_send : std::set<ServerId>{};
}

std::set<ServerId> FaultSchedule::FaultyAfterSend(Round round) const {
  const auto* occ = At(round);
  return occ ? occ->PostSend() : std::set<ServerId>{};
}

std::set<ServerId> FaultSchedule::UnrestoredAt(Round round) const {
  auto it = unrestored_.find(round);
  return it == unrestored_.end() ? std::set<ServerId>{} : it->second;
}

RoundOccupancy AdvanceSchedule(ModelId model, const Strategy& strategy,
                               Rng& rng, int n, int f, Round round,
                               const std::set<ServerId>& prev) {
  using Kind = Strategy::Kind;
  RoundOccupancy occ;
  const ScriptedRound* step = nullptr;
  if (strategy.kind == Kind::kScripted) {
    auto it = strategy.script.find(round);
    if (it != strategy.script.end()) step = &it->second;
  }

  if (model != ModelId::kBuhrman) {
    switch (strategy.kind) {
      case Kind::kNone:
        break;
      case Kind::kStationary:
        occ.pre_send = prev.empty() ? FirstServers(n, f) : prev;
        break;
      case Kind::kSweep:
      case Kind::kSplitVote:
        occ.pre_send = SweepNext(prev, n, f);
        break;
      case Kind::kRandomWalk:
        occ.pre_send = RandomSubset(rng, n, f);
        break;
      case Kind::kScripted:
        if (step && step->occupied) occ.pre_send = *step->occupied;
        if (step && !step->moves.empty()) {
          throw ConfigError(
              "send-phase movements only exist in the buhrman model");
        }
        break;
    }
  } else {
    // Agents never jump between rounds; they start where the last send
    // phase left them.
    occ.pre_send = prev;
    if (prev.empty()) {
      switch (strategy.kind) {
        case Kind::kNone:
          break;
        case Kind::kStationary:
        case Kind::kSweep:
        case Kind::kSplitVote:
          occ.pre_send = FirstServers(n, f);
          break;
        case Kind::kRandomWalk:
          occ.pre_send = RandomSubset(rng, n, f);
          break;
        case Kind::kScripted:
          if (step && step->occupied) occ.pre_send = *step->occupied;
          break;
      }
    } else if (step && step->occupied && *step->occupied != prev) {
      throw ConfigError("round " + std::to_string(round) + ": agents are on " +
                        Describe(prev) + ", scripted placement " +
                        Describe(*step->occupied) +
                        " would need a jump outside the send phase");
    }

    switch (strategy.kind) {
      case Kind::kNone:
      case Kind::kStationary:
        break;
      case Kind::kSweep:
      case Kind::kSplitVote:
        occ.moves = PairMoves(occ.pre_send, SweepNext(occ.pre_send, n, f));
        break;
      case Kind::kRandomWalk: {
        std::set<ServerId> post = occ.pre_send;
        for (ServerId from : occ.pre_send) {
          if (!rng.Bernoulli(0.5)) continue;
          std::vector<ServerId> free;
          for (int i = 1; i <= n; ++i) {
            if (!post.count(ServerId{i})) free.push_back(ServerId{i});
          }
          if (free.empty()) continue;
          ServerId to = free[rng.UniformInt(0, static_cast<std::int64_t>(free.size()) - 1)];
          occ.moves.push_back({from, to});
          post.erase(from);
          post.insert(to);
        }
        break;
      }
      case Kind::kScripted:
        if (step) occ.moves = step->moves;
        break;
    }
    ValidateMoves(occ.pre_send, occ.moves, n);
  }

  if (static_cast<int>(occ.pre_send.size()) > f ||
      static_cast<int>(occ.PostSend().size()) > f) {
    throw ConfigError("round " + std::to_string(round) + ": placement " +
                      Describe(occ.pre_send) + " exceeds f=" +
                      std::to_string(f));
  }
  return occ;
}

FaultStatus StatusAtSend(ModelId model, ServerId server, Round round,
                         const FaultSchedule& schedule) {
  if (schedule.FaultyAtSend(round).count(server)) return FaultStatus::kFaulty;
  if (model == ModelId::kBuhrman) {
    return schedule.UnrestoredAt(round).count(server) ? FaultStatus::kCured
                                                      : FaultStatus::kCorrect;
  }
  return schedule.FaultyAtSend(round - 1).count(server) ? FaultStatus::kCured
                                                        : FaultStatus::kCorrect;
}

Behavior EffectiveBehavior(ModelId model, ServerId server, Round round,
                           const FaultSchedule& schedule) {
  switch (StatusAtSend(model, server, round, schedule)) {
    case FaultStatus::kCorrect:
      return Behavior::kHonest;
    case FaultStatus::kFaulty:
      return Behavior::kByzantine;
    case FaultStatus::kCured:
      switch (model) {
        case ModelId::kGaray:
        case ModelId::kBuhrman:
          return Behavior::kCuredSilentCapable;
        case ModelId::kBonnet:
          return Behavior::kCuredConstrained;
        case ModelId::kSasaki:
          return Behavior::kByzantine;
      }
  }
  return Behavior::kHonest;
}

// ---------------------------------------------------------------------------

Value ColludingLie(const Strategy& strategy, Rng& rng,
                   std::span<const Value> observed) {
  if (strategy.policy() != MessagePolicy::kRandom) return strategy.lie;
  const auto pick = rng.UniformInt(0, 99);
  if (pick < 30) return strategy.lie;
  if (pick < 40) return Value::Bottom();
  if (pick < 80 && !observed.empty()) return PickObserved(rng, observed);
  return Value::Of(-rng.UniformInt(2, 1000));
}

ServerState CorruptState(const Strategy& strategy, Rng& rng, ServerState state,
                         const AdversaryContext& ctx) {
  switch (strategy.policy()) {
    case MessagePolicy::kNone:
      break;
    case MessagePolicy::kLie:
    case MessagePolicy::kSplitVote:
      state.value = strategy.lie;
      break;
    case MessagePolicy::kRandom: {
      const auto pick = rng.UniformInt(0, 9);
      state.value = pick < 6   ? ctx.round_lie
                    : pick < 9 ? PickObserved(rng, ctx.observed)
                               : Value::Bottom();
      state.current_reads.clear();
      for (int c = 1; c <= ctx.clients; ++c) {
        if (rng.Bernoulli(0.3)) state.current_reads.insert(ClientId{c});
      }
      break;
    }
  }
  return state;
}

RecipientMessages GroupByRecipient(const std::vector<Envelope>& envelopes) {
  RecipientMessages out;
  for (const auto& e : envelopes) out[e.to].push_back(e.msg);
  return out;
}

RecipientMessages CorruptOutgoing(Behavior behavior, const Strategy& strategy,
                                  Rng& rng, ServerId self,
                                  const RecipientMessages& honest,
                                  Value state_value,
                                  const AdversaryContext& ctx) {
  const MessagePolicy policy = strategy.policy();
  if (behavior == Behavior::kHonest ||
      behavior == Behavior::kCuredSilentCapable ||
      policy == MessagePolicy::kNone) {
    return honest;
  }

  if (behavior == Behavior::kCuredConstrained) {
    // One content for everybody the protocol would have addressed.
    Value content = ctx.round_lie;
    if (policy == MessagePolicy::kRandom && rng.Bernoulli(0.3)) {
      content = state_value;
    }
    RecipientMessages out;
    for (const auto& [to, msgs] : honest) {
      for (const auto& m : msgs) out[to].push_back(WithValue(m, content));
    }
    return out;
  }

  RecipientMessages out;
  const auto servers = ctx.servers;
  const auto clients = ctx.clients;
  switch (policy) {
    case MessagePolicy::kNone:
      return honest;
    case MessagePolicy::kLie:
      for (int s = 1; s <= servers; ++s) {
        out[ProcessId::Of(ServerId{s})].push_back(EchoMsg{ctx.round_lie, self});
      }
      for (int c = 1; c <= clients; ++c) {
        out[ProcessId::Of(ClientId{c})].push_back(ReplyMsg{ctx.round_lie, self});
      }
      return out;
    case MessagePolicy::kSplitVote:
      for (const auto& [to, msgs] : honest) {
        if (to.is_server()) out[to] = msgs;
      }
      for (int c = 1; c <= clients; ++c) {
        out[ProcessId::Of(ClientId{c})].push_back(ReplyMsg{ctx.round_lie, self});
      }
      return out;
    case MessagePolicy::kRandom:
      break;
  }

  for (int s = 1; s <= servers; ++s) {
    const ProcessId to = ProcessId::Of(ServerId{s});
    auto& box = out[to];
    const auto pick = rng.UniformInt(0, 99);
    if (pick < 30) {
      if (auto it = honest.find(to); it != honest.end()) box = it->second;
    } else if (pick < 70) {
      box.push_back(EchoMsg{ctx.round_lie, self});
    } else if (pick < 85) {
      // silent towards this server
    } else if (pick < 95) {
      box.push_back(EchoMsg{PickObserved(rng, ctx.observed), self});
    } else {
      box.push_back(EchoMsg{ctx.round_lie, self});
      box.push_back(EchoMsg{PickObserved(rng, ctx.observed), self});
    }
    if (rng.Bernoulli(0.03)) {
      const int other = static_cast<int>(rng.UniformInt(1, servers));
      box.push_back(EchoMsg{ctx.round_lie, ServerId{other}});
    }
    if (clients > 0 && rng.Bernoulli(0.02)) {
      const int victim = static_cast<int>(rng.UniformInt(1, clients));
      box.push_back(WriteMsg{ctx.round_lie, ClientId{victim}});
    }
  }
  for (int c = 1; c <= clients; ++c) {
    const ProcessId to = ProcessId::Of(ClientId{c});
    auto& box = out[to];
    const auto pick = rng.UniformInt(0, 99);
    if (pick < 60) {
      box.push_back(ReplyMsg{ctx.round_lie, self});
    } else if (pick < 80) {
      if (auto it = honest.find(to); it != honest.end()) box = it->second;
    } else if (pick < 90) {
      box.push_back(ReplyMsg{PickObserved(rng, ctx.observed), self});
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.empty(); });
  return out;
}

std::string_view ToString(FaultStatus status) {
  switch (status) {
    case FaultStatus::kCorrect:
      return "correct";
    case FaultStatus::kFaulty:
      return "faulty";
    case FaultStatus::kCured:
      return "cured";
  }
  return "unknown";
}

std::string_view ToString(Behavior behavior) {
  switch (behavior) {
    case Behavior::kHonest:
      return "honest";
    case Behavior::kByzantine:
      return "byzantine";
    case Behavior::kCuredSilentCapable:
      return "cured_silent_capable";
    case Behavior::kCuredConstrained:
      return "cured_constrained";
  }
  return "unknown";
}

}  // namespace mbreg
