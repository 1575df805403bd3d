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

#include <doctest.h>

#include "mbreg/adversary.hpp"
#include "mbreg/errors.hpp"

using namespace mbreg;

namespace {

std::set<ServerId> S(std::initializer_list<int> ids) {
  std::set<ServerId> out;
  for (int i : ids) out.insert(ServerId{i});
  return out;
}

AdversaryContext Ctx(Value lie, int servers = 4, int clients = 2) {
  AdversaryContext ctx;
  ctx.round = 3;
  ctx.servers = servers;
  ctx.clients = clients;
  ctx.round_lie = lie;
  return ctx;
}

RecipientMessages HonestTraffic(ServerId self, Value v, int servers,
                                std::set<ClientId> readers) {
  std::vector<Outgoing> out = {{Destination::AllServers(), EchoMsg{v, self}}};
  for (ClientId c : readers) out.push_back({Destination::To(c), ReplyMsg{v, self}});
  return GroupByRecipient(Expand(ProcessId::Of(self), out, servers));
}

}  // namespace

TEST_CASE("schedule examples") {
  Rng rng(1);
  SUBCASE("stationary keeps its servers") {
    auto occ = AdvanceSchedule(ModelId::kGaray, Strategy::Of(Strategy::Kind::kStationary),
                               rng, 7, 2, 5, S({1, 2}));
    CHECK(occ.pre_send == S({1, 2}));
    CHECK(occ.moves.empty());
  }
  SUBCASE("sweep rotates") {
    auto occ = AdvanceSchedule(ModelId::kGaray, Strategy::Of(Strategy::Kind::kSweep),
                               rng, 7, 2, 5, S({1, 2}));
    CHECK(occ.pre_send == S({3, 4}));
    auto wrap = AdvanceSchedule(ModelId::kGaray, Strategy::Of(Strategy::Kind::kSweep),
                                rng, 7, 2, 6, S({6, 7}));
    CHECK(wrap.pre_send == S({1, 2}));
    auto split = AdvanceSchedule(ModelId::kGaray, Strategy::Of(Strategy::Kind::kSweep),
                                 rng, 7, 2, 6, S({5, 6}));
    CHECK(split.pre_send == S({7, 1}));
  }
  SUBCASE("scripted M4 move travels with the send") {
    Strategy st = Strategy::Of(Strategy::Kind::kScripted);
    st.script[1].occupied = S({1});
    st.script[1].moves = {{ServerId{1}, ServerId{5}}};
    auto occ = AdvanceSchedule(ModelId::kBuhrman, st, rng, 5, 1, 1, {});
    CHECK(occ.pre_send == S({1}));
    CHECK(occ.moves == std::vector<Movement>{{ServerId{1}, ServerId{5}}});
    CHECK(occ.PostSend() == S({5}));
    CHECK(occ.Vacated() == S({1}));
  }
  SUBCASE("none places nobody") {
    auto occ = AdvanceSchedule(ModelId::kSasaki, Strategy::Of(Strategy::Kind::kNone),
                               rng, 9, 2, 1, {});
    CHECK(occ.pre_send.empty());
  }
}

TEST_CASE("random walk stays within f and is seed-determined") {
  for (ModelId m : kAllModels) {
    Rng a(42), b(42);
    std::set<ServerId> pa, pb;
    for (Round r = 1; r <= 200; ++r) {
      Rng ra = a.Stream("schedule", r, 0), rb = b.Stream("schedule", r, 0);
      auto oa = AdvanceSchedule(m, Strategy::Of(Strategy::Kind::kRandomWalk), ra, 9, 2, r, pa);
      auto ob = AdvanceSchedule(m, Strategy::Of(Strategy::Kind::kRandomWalk), rb, 9, 2, r, pb);
      CHECK(oa.pre_send == ob.pre_send);
      CHECK(oa.moves == ob.moves);
      CHECK(oa.pre_send.size() == 2);
      CHECK(oa.PostSend().size() == 2);
      if (m == ModelId::kBuhrman && r > 1) CHECK(oa.pre_send == pa);
      if (m != ModelId::kBuhrman) CHECK(oa.moves.empty());
      pa = oa.PostSend();
      pb = ob.PostSend();
    }
  }
}

TEST_CASE("scripted schedules are validated") {
  Strategy st = Strategy::Of(Strategy::Kind::kScripted);
  SUBCASE("too many agents") {
    st.script[2].occupied = S({1, 2, 3});
    CHECK_THROWS_AS(ValidateStrategy(st, ModelId::kGaray, 7, 2), ConfigError);
    Rng rng(1);
    CHECK_THROWS_AS(AdvanceSchedule(ModelId::kGaray, st, rng, 7, 2, 2, {}), ConfigError);
  }
  SUBCASE("unknown server") {
    st.script[2].occupied = S({9});
    CHECK_THROWS_AS(ValidateStrategy(st, ModelId::kGaray, 7, 2), ConfigError);
  }
  SUBCASE("moves outside M4") {
    st.script[2].moves = {{ServerId{1}, ServerId{2}}};
    CHECK_THROWS_AS(ValidateStrategy(st, ModelId::kBonnet, 9, 2), ConfigError);
    CHECK_NOTHROW(ValidateStrategy(st, ModelId::kBuhrman, 9, 2));
  }
  SUBCASE("M4 move from an empty server") {
    st.script[1].occupied = S({1});
    st.script[2].moves = {{ServerId{3}, ServerId{4}}};
    Rng rng(1);
    CHECK_THROWS_AS(AdvanceSchedule(ModelId::kBuhrman, st, rng, 5, 1, 2, S({1})),
                    ConfigError);
  }
  SUBCASE("M4 move onto an occupied server") {
    st.script[2].moves = {{ServerId{1}, ServerId{2}}};
    Rng rng(1);
    CHECK_THROWS_AS(AdvanceSchedule(ModelId::kBuhrman, st, rng, 5, 2, 2, S({1, 2})),
                    ConfigError);
  }
  SUBCASE("M4 agents cannot jump between rounds") {
    st.script[3].occupied = S({4});
    Rng rng(1);
    CHECK_THROWS_AS(AdvanceSchedule(ModelId::kBuhrman, st, rng, 5, 1, 3, S({1})),
                    ConfigError);
  }
}

TEST_CASE("fault status and behaviour per model") {
  FaultSchedule sched;
  RoundOccupancy r1, r2;
  r1.pre_send = S({1});
  r2.pre_send = S({2});
  sched.Record(1, r1);
  sched.Record(2, r2);

  CHECK(StatusAtSend(ModelId::kGaray, ServerId{1}, 1, sched) == FaultStatus::kFaulty);
  CHECK(StatusAtSend(ModelId::kGaray, ServerId{1}, 2, sched) == FaultStatus::kCured);
  CHECK(StatusAtSend(ModelId::kGaray, ServerId{3}, 2, sched) == FaultStatus::kCorrect);
  CHECK(StatusAtSend(ModelId::kGaray, ServerId{1}, 3, sched) == FaultStatus::kCorrect);

  CHECK(EffectiveBehavior(ModelId::kSasaki, ServerId{1}, 2, sched) == Behavior::kByzantine);
  CHECK(EffectiveBehavior(ModelId::kBonnet, ServerId{1}, 2, sched) ==
        Behavior::kCuredConstrained);
  CHECK(EffectiveBehavior(ModelId::kGaray, ServerId{1}, 2, sched) ==
        Behavior::kCuredSilentCapable);
  CHECK(EffectiveBehavior(ModelId::kGaray, ServerId{2}, 2, sched) == Behavior::kByzantine);
  CHECK(EffectiveBehavior(ModelId::kGaray, ServerId{3}, 2, sched) == Behavior::kHonest);

  FaultSchedule m4;
  RoundOccupancy a;
  a.pre_send = S({1});
  a.moves = {{ServerId{1}, ServerId{2}}};
  m4.Record(1, a);
  m4.RecordUnrestored(2, S({1}));
  RoundOccupancy b;
  b.pre_send = S({2});
  m4.Record(2, b);
  CHECK(StatusAtSend(ModelId::kBuhrman, ServerId{1}, 1, m4) == FaultStatus::kFaulty);
  CHECK(StatusAtSend(ModelId::kBuhrman, ServerId{2}, 1, m4) == FaultStatus::kCorrect);
  CHECK(m4.FaultyAfterSend(1) == S({2}));
  CHECK(StatusAtSend(ModelId::kBuhrman, ServerId{1}, 2, m4) == FaultStatus::kCured);
  CHECK(EffectiveBehavior(ModelId::kBuhrman, ServerId{1}, 2, m4) ==
        Behavior::kCuredSilentCapable);
}

TEST_CASE("state corruption") {
  ServerState s = MakeServer(ServerId{3});
  s.value = Value::Of(1);
  s.current_reads = {ClientId{1}};
  SUBCASE("split vote plants the lie") {
    Strategy st = Strategy::Of(Strategy::Kind::kSplitVote);
    st.lie = Value::Of(2);
    Rng rng(1);
    ServerState out = CorruptState(st, rng, s, Ctx(st.lie));
    CHECK(out.value == Value::Of(2));
    CHECK(out.id == s.id);
  }
  SUBCASE("no-op strategy leaves the state alone") {
    Rng rng(1);
    CHECK(CorruptState(Strategy::Of(Strategy::Kind::kNone), rng, s, Ctx(Value::Of(2))) == s);
  }
  SUBCASE("random strategy is reproducible per seed") {
    Strategy st = Strategy::Of(Strategy::Kind::kRandomWalk);
    std::vector<Value> observed = {Value::Of(10), Value::Of(11)};
    AdversaryContext ctx = Ctx(Value::Of(-5));
    ctx.observed = observed;
    Rng a(42), b(42);
    ServerState x = CorruptState(st, a, s, ctx);
    ServerState y = CorruptState(st, b, s, ctx);
    CHECK(x == y);
    CHECK(x.id == s.id);
    bool changed = false;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng r(seed);
      changed = changed || CorruptState(st, r, s, ctx).value != s.value;
    }
    CHECK(changed);
  }
}

TEST_CASE("outgoing corruption") {
  const ServerId self{2};
  const Value v = Value::Of(1), lie = Value::Of(2);
  const auto honest = HonestTraffic(self, v, 4, {ClientId{1}});
  Rng rng(3);

  SUBCASE("honest passthrough") {
    Strategy st = Strategy::Of(Strategy::Kind::kSplitVote);
    CHECK(CorruptOutgoing(Behavior::kHonest, st, rng, self, honest, v, Ctx(lie)) == honest);
    CHECK(CorruptOutgoing(Behavior::kCuredSilentCapable, st, rng, self, honest, v,
                          Ctx(lie)) == honest);
  }
  SUBCASE("split vote: honest echoes, lying replies") {
    Strategy st = Strategy::Of(Strategy::Kind::kSplitVote);
    st.lie = lie;
    auto out = CorruptOutgoing(Behavior::kByzantine, st, rng, self, honest, v, Ctx(lie));
    for (int s = 1; s <= 4; ++s) {
      CHECK(out.at(ProcessId::Of(ServerId{s})) ==
            std::vector<Message>{EchoMsg{v, self}});
    }
    for (int c = 1; c <= 2; ++c) {
      CHECK(out.at(ProcessId::Of(ClientId{c})) ==
            std::vector<Message>{ReplyMsg{lie, self}});
    }
  }
  SUBCASE("constrained cure sends one content to everybody") {
    Strategy st = Strategy::Of(Strategy::Kind::kSplitVote);
    st.lie = lie;
    auto out = CorruptOutgoing(Behavior::kCuredConstrained, st, rng, self, honest, v,
                               Ctx(lie));
    CHECK(out.size() == honest.size());
    for (const auto& [to, msgs] : out) {
      for (const auto& m : msgs) {
        CHECK(ClaimedSender(m) == ProcessId::Of(self));
        if (const auto* e = std::get_if<EchoMsg>(&m)) CHECK(e->value == lie);
        if (const auto* r = std::get_if<ReplyMsg>(&m)) CHECK(r->value == lie);
      }
    }
  }
  SUBCASE("constrained cure under the random policy is still uniform") {
    Strategy st = Strategy::Of(Strategy::Kind::kRandomWalk);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng r(seed);
      auto out = CorruptOutgoing(Behavior::kCuredConstrained, st, r, self, honest, v,
                                 Ctx(lie));
      std::set<Value> contents;
      for (const auto& [to, msgs] : out) {
        for (const auto& m : msgs) {
          if (const auto* e = std::get_if<EchoMsg>(&m)) contents.insert(e->value);
          if (const auto* rep = std::get_if<ReplyMsg>(&m)) contents.insert(rep->value);
        }
      }
      CHECK(contents.size() == 1);
    }
  }
  SUBCASE("random Byzantine traffic equivocates and tries forgeries") {
    Strategy st = Strategy::Of(Strategy::Kind::kRandomWalk);
    bool equivocated = false, forged = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng r(seed);
      auto out = CorruptOutgoing(Behavior::kByzantine, st, r, self, honest, v,
                                 Ctx(lie, 8, 3));
      std::set<Value> echoed;
      for (const auto& [to, msgs] : out) {
        for (const auto& m : msgs) {
          if (ClaimedSender(m) != ProcessId::Of(self)) forged = true;
          if (const auto* e = std::get_if<EchoMsg>(&m)) {
            if (e->server == self) echoed.insert(e->value);
          }
        }
      }
      if (echoed.size() > 1) equivocated = true;
    }
    CHECK(equivocated);
    CHECK(forged);
  }
}

TEST_CASE("strategy and policy names") {
  for (auto k : {Strategy::Kind::kNone, Strategy::Kind::kStationary, Strategy::Kind::kSweep,
                 Strategy::Kind::kRandomWalk, Strategy::Kind::kSplitVote,
                 Strategy::Kind::kScripted}) {
    CHECK(ParseStrategyKind(StrategyName(k)) == k);
  }
  CHECK(ParseStrategyKind("random") == Strategy::Kind::kRandomWalk);
  CHECK_FALSE(ParseStrategyKind("chaos").has_value());
  CHECK(ParsePolicy("lie") == MessagePolicy::kLie);
  CHECK_FALSE(ParsePolicy("loud").has_value());
  CHECK(Strategy::Of(Strategy::Kind::kSweep).policy() == MessagePolicy::kLie);
  CHECK(Strategy::Of(Strategy::Kind::kRandomWalk).policy() == MessagePolicy::kRandom);
}
