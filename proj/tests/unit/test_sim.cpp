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

#include <nlohmann/json.hpp>

#include "mbreg/checker.hpp"
#include "mbreg/errors.hpp"
#include "mbreg/sim.hpp"

using namespace mbreg;

namespace {

SimOptions Options(ModelId m, int n, int f, Round rounds, Strategy::Kind kind,
                   std::uint64_t seed = 1) {
  SimOptions o;
  o.config = MakeConfig(m, n, f);
  o.clients = 3;
  o.rounds = rounds;
  o.seed = seed;
  o.strategy = Strategy::Of(kind);
  return o;
}

SimOptions RandomRun(ModelId m, int f, std::uint64_t seed, Round rounds = 120) {
  SimOptions o = Options(m, Lookup(m).alpha * f + 1, f, rounds,
                         Strategy::Kind::kRandomWalk, seed);
  o.clients = 4;
  o.workload = GenerateRandomWorkload(4, rounds, seed, RandomWorkloadParams{});
  return o;
}

}  // namespace

TEST_CASE("fault-free write then read") {
  SimOptions o = Options(ModelId::kGaray, 7, 2, 5, Strategy::Kind::kNone);
  o.workload.directives = {{1, ClientId{1}, Directive::Kind::kWrite, Value::Of(5)},
                           {2, ClientId{2}, Directive::Kind::kRead, {}}};
  const SimResult r = Run(o);
  REQUIRE(r.history.operations.size() == 2);
  const auto& w = r.history.operations[0];
  const auto& rd = r.history.operations[1];
  CHECK(w.invoke == 1);
  CHECK(w.response == 1);
  CHECK(rd.invoke == 2);
  CHECK(rd.response == 3);
  CHECK(rd.result == Value::Of(5));
  CHECK(r.probes.violations.empty());
  for (const auto& s : r.final_servers) CHECK(s.value == Value::Of(5));
}

TEST_CASE("empty workload runs clean") {
  for (ModelId m : kAllModels) {
    for (auto kind : {Strategy::Kind::kNone, Strategy::Kind::kRandomWalk}) {
      SimOptions o = Options(m, Lookup(m).alpha * 2 + 1, 2, 100, kind);
      const SimResult r = Run(o);
      CHECK(r.history.operations.empty());
      CHECK(r.probes.violations.empty());
      CHECK(r.probes.rounds.size() == 101);
    }
  }
}

TEST_CASE("round zero holds bottom everywhere") {
  const SimResult r = Run(Options(ModelId::kBonnet, 9, 2, 0, Strategy::Kind::kRandomWalk));
  REQUIRE(r.probes.rounds.size() == 1);
  CHECK(r.probes.rounds[0].round == 0);
  CHECK(r.probes.rounds[0].modal.is_bottom());
  CHECK(r.probes.rounds[0].support == 9);
}

TEST_CASE("a completed write is held by n - f servers at the end of its round") {
  SimOptions o = Options(ModelId::kGaray, 7, 2, 6, Strategy::Kind::kSweep);
  o.workload.directives = {{3, ClientId{1}, Directive::Kind::kWrite, Value::Of(9)}};
  const SimResult r = Run(o);
  const RoundProbe& p = r.probes.rounds[3];
  CHECK(p.round == 3);
  CHECK(p.modal == Value::Of(9));
  CHECK(p.support >= 5);
  CHECK(r.probes.violations.empty());
}

TEST_CASE("identical inputs give identical traces") {
  SimOptions o = RandomRun(ModelId::kSasaki, 2, 7);
  CollectingTraceSink a, b;
  HashingTraceSink ha, hb;
  o.trace = &a;
  const SimResult ra = Run(o);
  o.trace = &b;
  const SimResult rb = Run(o);
  REQUIRE(a.events().size() == b.events().size());
  bool same = true;
  for (std::size_t i = 0; i < a.events().size(); ++i) {
    same = same && FormatTraceLine(a.events()[i]) == FormatTraceLine(b.events()[i]);
  }
  CHECK(same);
  CHECK(ra.history == rb.history);
  o.trace = &ha;
  Run(o);
  o.trace = &hb;
  Run(o);
  CHECK(ha.digest() == hb.digest());
  o.seed = 8;
  HashingTraceSink hc;
  o.trace = &hc;
  Run(o);
  CHECK(hc.digest() != ha.digest());
}

TEST_CASE("admissible random runs satisfy every runtime invariant") {
  for (ModelId m : kAllModels) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SimOptions o = RandomRun(m, 2, seed);
      o.verify_inbox_permutation = true;
      const SimResult r = Run(o);
      CAPTURE(ModelName(m));
      CAPTURE(seed);
      CHECK(r.probes.violations.empty());
      CHECK(r.probes.MinSupport() >= o.config.n - o.config.f);
      for (const auto& v : CheckAll(r.history)) CHECK(v.passed);
      for (const auto& op : r.history.operations) {
        REQUIRE(op.response.has_value());
        CHECK(*op.response - op.invoke == (op.kind == OpKind::kWrite ? 0 : 1));
      }
    }
  }
}

TEST_CASE("the network rejects forgeries and cured servers drop readers") {
  int rejected = 0, dropped = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SimResult r = Run(RandomRun(ModelId::kGaray, 2, seed, 200));
    for (const auto& p : r.probes.rounds) {
      rejected += p.rejected;
      dropped += p.dropped_reads;
    }
  }
  CHECK(rejected > 0);
  CHECK(dropped > 0);
}

TEST_CASE("M4 agents actually move") {
  const SimResult r = Run(RandomRun(ModelId::kBuhrman, 2, 3));
  int moves = 0;
  for (const auto& [round, occ] : r.schedule.rounds()) moves += occ.moves.size();
  CHECK(moves > 10);
  CHECK(r.probes.CountViolations("m4_honest_send") == 0);
}

TEST_CASE("inadmissible runs need the override and record broken agreement") {
  SimOptions o = RandomRun(ModelId::kGaray, 2, 1);
  o.config = MakeConfig(ModelId::kGaray, 6, 2);
  CHECK_THROWS_AS(Run(o), ConfigError);
  o.allow_inadmissible = true;
  int agreement = 0, failures = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    o.seed = seed;
    const SimResult r = Run(o);
    CHECK_FALSE(r.admissible);
    agreement += r.probes.CountViolations("agreement");
    failures += static_cast<int>(r.probes.read_failures.size());
  }
  CHECK(agreement > 0);
  CHECK(failures > 0);
}

TEST_CASE("configuration errors surface before anything runs") {
  CollectingTraceSink sink;
  SimOptions o = Options(ModelId::kGaray, 7, 2, 10, Strategy::Kind::kNone);
  o.trace = &sink;
  SUBCASE("overlapping directives") {
    o.workload.directives = {{1, ClientId{1}, Directive::Kind::kRead, {}},
                             {2, ClientId{1}, Directive::Kind::kRead, {}}};
    CHECK_THROWS_AS(Run(o), ConfigError);
  }
  SUBCASE("bad scripted schedule") {
    o.strategy = Strategy::Of(Strategy::Kind::kScripted);
    o.strategy.script[1].occupied = std::set<ServerId>{ServerId{1}, ServerId{2}, ServerId{3}};
    CHECK_THROWS_AS(Run(o), ConfigError);
  }
  SUBCASE("negative rounds") {
    o.rounds = -1;
    CHECK_THROWS_AS(Run(o), ConfigError);
  }
  SUBCASE("bad n") {
    o.config.n = 0;
    CHECK_THROWS_AS(Run(o), ConfigError);
  }
  CHECK(sink.events().empty());
}

TEST_CASE("an M4 script moving from an empty server is rejected up front") {
  CollectingTraceSink sink;
  SimOptions o = Options(ModelId::kBuhrman, 5, 2, 6, Strategy::Kind::kScripted);
  o.trace = &sink;
  o.strategy.script[2].moves = {{ServerId{1}, ServerId{3}}};
  CHECK_THROWS_AS(Run(o), ConfigError);
  CHECK(sink.events().empty());
  o.strategy.script[1].occupied = std::set<ServerId>{ServerId{1}, ServerId{2}};
  CHECK_NOTHROW(Run(o));
  CHECK_FALSE(sink.events().empty());
}

TEST_CASE("crashed clients leave pending operations") {
  SimOptions o = Options(ModelId::kBonnet, 9, 2, 8, Strategy::Kind::kRandomWalk);
  o.workload.directives = {{1, ClientId{1}, Directive::Kind::kWrite, Value::Of(4)},
                           {3, ClientId{2}, Directive::Kind::kRead, {}},
                           {4, ClientId{2}, Directive::Kind::kCrash, {}}};
  const SimResult r = Run(o);
  REQUIRE(r.history.operations.size() == 2);
  CHECK_FALSE(r.history.operations[1].response.has_value());
  CHECK(r.history.crashes.at(ClientId{2}) == 4);
  CHECK(CheckTermination(r.history).passed);
}

TEST_CASE("agreement probe") {
  std::vector<ServerState> servers;
  for (int i = 1; i <= 5; ++i) servers.push_back(MakeServer(ServerId{i}));
  servers[0].value = Value::Of(3);
  servers[1].value = Value::Of(3);
  servers[2].value = Value::Of(2);
  servers[3].value = Value::Of(2);
  servers[4].value = Value::Of(3);
  std::vector<FaultStatus> st(5, FaultStatus::kCorrect);
  Agreement a = ProbeAgreement(servers, st);
  CHECK(a.modal == Value::Of(3));
  CHECK(a.support == 3);
  st[4] = FaultStatus::kFaulty;
  a = ProbeAgreement(servers, st);
  CHECK(a.modal == Value::Of(2));
  CHECK(a.support == 2);
  st[0] = FaultStatus::kCured;
  CHECK(ProbeAgreement(servers, st).support == 2);
}

TEST_CASE("probe report serializes") {
  SimOptions o = RandomRun(ModelId::kGaray, 1, 1, 20);
  const SimResult r = Run(o);
  const auto j = nlohmann::json::parse(ProbeReportToJson(r.probes, r, o));
  CHECK(j["model"] == "garay");
  CHECK(j["per_round"].size() == 21);
  CHECK(j["violations"].empty());
  CHECK(j["min_support"] == r.probes.MinSupport());
}
