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

#ifndef MBREG_ADVERSARY_HPP_
#define MBREG_ADVERSARY_HPP_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "mbreg/message.hpp"
#include "mbreg/model_params.hpp"
#include "mbreg/protocol.hpp"
#include "mbreg/rng.hpp"
#include "mbreg/types.hpp"

namespace mbreg {

enum class FaultStatus { kCorrect, kFaulty, kCured };

/// How a server's outgoing traffic is produced in a send phase.
enum class Behavior {
  kHonest,
  /// Arbitrary per-recipient messages, equivocation included.
  kByzantine,
  /// Cured and told so by the oracle; the protocol itself stays silent.
  kCuredSilentCapable,
  /// Cured, unaware, and limited to one message content for everybody.
  kCuredConstrained,
};

/// What Byzantine senders say.
enum class MessagePolicy {
  kNone,
  /// The same fabricated value to every recipient.
  kLie,
  /// Honest echoes to servers, the fabricated value to readers.
  kSplitVote,
  /// Seeded mix of honest, fabricated, stale and missing messages,
  /// equivocating per recipient, plus forgery attempts.
  kRandom,
};

struct Movement {
  ServerId from;
  ServerId to;
  friend constexpr auto operator<=>(const Movement&,
                                    const Movement&) = default;
};

/// Agent placement for one round. For M1-M3 `moves` is always empty and
/// `pre_send` is the faulty set of the whole round. For M4 agents start the
/// round on `pre_send` and travel with the messages of the send phase.
struct RoundOccupancy {
  std::set<ServerId> pre_send;
  std::vector<Movement> moves;

  std::set<ServerId> PostSend() const;
  /// Servers an agent left during the send phase (M4 only).
  std::set<ServerId> Vacated() const;
};

struct ScriptedRound {
  /// M1-M3: the faulty set of the round. M4: the initial placement, only
  /// honoured while no agent is placed yet.
  std::optional<std::set<ServerId>> occupied;
  std::vector<Movement> moves;
};

struct Strategy {
  enum class Kind {
    kNone,
    kStationary,
    kSweep,
    kRandomWalk,
    kSplitVote,
    kScripted,
  };

  Kind kind = Kind::kNone;
  /// Fabricated value used by kLie and kSplitVote traffic and by state
  /// corruption.
  Value lie = Value::Of(-1);
  MessagePolicy scripted_policy = MessagePolicy::kSplitVote;
  std::map<Round, ScriptedRound> script;

  MessagePolicy policy() const;

  static Strategy Of(Kind kind) {
    Strategy s;
    s.kind = kind;
    return s;
  }
};

std::string_view StrategyName(Strategy::Kind kind);
std::optional<Strategy::Kind> ParseStrategyKind(std::string_view text);
std::string_view PolicyName(MessagePolicy policy);
std::optional<MessagePolicy> ParsePolicy(std::string_view text);

/// Checks scripted placements against n and f. Throws ConfigError.
void ValidateStrategy(const Strategy& strategy, ModelId model, int n, int f);

/// Per-round record of agent placement plus, for M4, the servers that were
/// vacated earlier and have not yet re-adopted a backed value.
class FaultSchedule {
 public:
  void Record(Round round, RoundOccupancy occupancy);
  void RecordUnrestored(Round round, std::set<ServerId> servers);

  const RoundOccupancy* At(Round round) const;
  /// Faulty during the send phase of `round`.
  std::set<ServerId> FaultyAtSend(Round round) const;
  /// Faulty during receive and compute of `round`.
  std::set<ServerId> FaultyAfterSend(Round round) const;
  /// M4: cured servers carried into the start of `round`.
  std::set<ServerId> UnrestoredAt(Round round) const;

  const std::map<Round, RoundOccupancy>& rounds() const { return rounds_; }

 private:
  std::map<Round, RoundOccupancy> rounds_;
  std::map<Round, std::set<ServerId>> unrestored_;
};

/// Places the agents for `round` given the previous round's final placement.
/// Throws ConfigError if a scripted placement exceeds f or breaks the M4
/// movement rules.
RoundOccupancy AdvanceSchedule(ModelId model, const Strategy& strategy,
                               Rng& rng, int n, int f, Round round,
                               const std::set<ServerId>& prev);

/// Status at the start of the send phase of `round`.
FaultStatus StatusAtSend(ModelId model, ServerId server, Round round,
                         const FaultSchedule& schedule);

/// Behaviour of `server`'s send phase in `round`.
Behavior EffectiveBehavior(ModelId model, ServerId server, Round round,
                           const FaultSchedule& schedule);

/// What the adversary knows when it acts.
struct AdversaryContext {
  Round round = 0;
  int servers = 0;
  int clients = 0;
  /// The value every colluding agent pushes this round.
  Value round_lie;
  /// Values the agents have seen so far (stale-value pool).
  std::span<const Value> observed;
};

/// Picks the round's colluding value for the random policy; the strategy's
/// fixed lie otherwise.
Value ColludingLie(const Strategy& strategy, Rng& rng,
                   std::span<const Value> observed);

/// State an agent leaves behind. Identity is never touched.
ServerState CorruptState(const Strategy& strategy, Rng& rng, ServerState state,
                         const AdversaryContext& ctx);

using RecipientMessages = std::map<ProcessId, std::vector<Message>>;

RecipientMessages GroupByRecipient(const std::vector<Envelope>& envelopes);

/// Replaces the honest traffic of `self` according to `behavior`. The
/// result may contain forged payloads; the network rejects those.
RecipientMessages CorruptOutgoing(Behavior behavior, const Strategy& strategy,
                                  Rng& rng, ServerId self,
                                  const RecipientMessages& honest,
                                  Value state_value,
                                  const AdversaryContext& ctx);

std::string_view ToString(FaultStatus status);
std::string_view ToString(Behavior behavior);

}  // namespace mbreg

#endif  // MBREG_ADVERSARY_HPP_
