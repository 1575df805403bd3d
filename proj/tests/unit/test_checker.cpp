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

#include <random>

#include "mbreg/checker.hpp"
#include "mbreg/errors.hpp"
#include "oracles/history_oracles.hpp"

using namespace mbreg;

namespace {

struct Builder {
  History h;
  int next = 1;

  Builder& Write(int client, std::int64_t v, Round inv, std::optional<Round> resp) {
    Operation op;
    op.id = next++;
    op.client = ClientId{client};
    op.kind = OpKind::kWrite;
    op.argument = Value::Of(v);
    op.invoke = inv;
    op.response = resp;
    h.operations.push_back(op);
    return *this;
  }
  Builder& Read(int client, std::optional<std::int64_t> v, Round inv,
                std::optional<Round> resp) {
    Operation op;
    op.id = next++;
    op.client = ClientId{client};
    op.kind = OpKind::kRead;
    op.invoke = inv;
    op.response = resp;
    if (resp) op.result = v ? Value::Of(*v) : Value::Bottom();
    h.operations.push_back(op);
    return *this;
  }
  Builder& Failed(int client, Round inv) {
    Operation op;
    op.id = next++;
    op.client = ClientId{client};
    op.kind = OpKind::kRead;
    op.invoke = inv;
    op.response = inv + 1;
    op.failed = true;
    h.operations.push_back(op);
    return *this;
  }
};

constexpr auto kBottom = std::nullopt;

// The crossed-reads scenario: two overlapping writes, a read sees v1 and a
// later read sees v2.
History CrossedReads() {
  return Builder()
      .Write(1, 2, 1, 3)
      .Write(2, 1, 2, 3)
      .Read(3, 1, 4, 5)
      .Read(4, 2, 6, 7)
      .h;
}

void ExpectWitnessReplays(const Verdict& v,
                          Verdict (*check)(const History&), const History& h) {
  REQUIRE_FALSE(v.passed);
  REQUIRE_FALSE(v.witness.empty());
  const History sub = SubHistory(h, v.witness);
  CHECK(sub.operations.size() == v.witness.size());
  CHECK_FALSE(check(sub).passed);
}

Verdict Termination(const History& h) { return CheckTermination(h); }

}  // namespace

TEST_CASE("termination") {
  SUBCASE("all responded") {
    CHECK(CheckTermination(Builder().Write(1, 1, 1, 1).Read(2, 1, 2, 3).h).passed);
  }
  SUBCASE("crashed client's pending read is excluded") {
    History h = Builder().Read(1, kBottom, 3, std::nullopt).h;
    h.crashes[ClientId{1}] = 4;
    CHECK(CheckTermination(h).passed);
  }
  SUBCASE("unresponded read fails with a witness") {
    History h = Builder().Write(1, 1, 1, 1).Read(2, kBottom, 3, std::nullopt).h;
    Verdict v = CheckTermination(h);
    CHECK(v.witness == std::vector<int>{2});
    ExpectWitnessReplays(v, Termination, h);
  }
  SUBCASE("failed read does not terminate") {
    History h = Builder().Failed(2, 3).h;
    CHECK_FALSE(CheckTermination(h).passed);
  }
  SUBCASE("workload crashes count") {
    History h = Builder().Read(1, kBottom, 3, std::nullopt).h;
    Workload w{{{3, ClientId{1}, Directive::Kind::kRead, {}},
                {4, ClientId{1}, Directive::Kind::kCrash, {}}}};
    CHECK_FALSE(CheckTermination(h).passed);
    CHECK(CheckTermination(h, w).passed);
  }
  SUBCASE("empty history") { CHECK(CheckTermination(History{}).passed); }
}

TEST_CASE("validity examples") {
  SUBCASE("write before read must be seen") {
    CHECK(CheckValidity(Builder().Write(1, 5, 1, 1).Read(2, 5, 2, 3).h).passed);
    History h = Builder().Write(1, 5, 1, 1).Read(2, kBottom, 2, 3).h;
    Verdict v = CheckValidity(h);
    ExpectWitnessReplays(v, CheckValidity, h);
  }
  SUBCASE("read before every write returns bottom") {
    CHECK(CheckValidity(Builder().Read(2, kBottom, 1, 2).Write(1, 5, 3, 3).h).passed);
    History h = Builder().Read(2, 5, 1, 2).Write(1, 5, 3, 3).h;
    ExpectWitnessReplays(CheckValidity(h), CheckValidity, h);
  }
  SUBCASE("concurrent write may or may not be seen") {
    auto base = [](std::optional<std::int64_t> got) {
      return Builder().Write(1, 3, 1, 1).Write(2, 5, 3, 3).Read(3, got, 2, 3).h;
    };
    CHECK(CheckValidity(base(3)).passed);
    CHECK(CheckValidity(base(5)).passed);
    History h = base(kBottom);
    ExpectWitnessReplays(CheckValidity(h), CheckValidity, h);
  }
  SUBCASE("overwritten value is stale") {
    History h = Builder().Write(1, 3, 1, 1).Write(2, 5, 2, 2).Read(3, 3, 4, 5).h;
    Verdict v = CheckValidity(h);
    CHECK(v.witness == std::vector<int>{1, 2, 3});
    ExpectWitnessReplays(v, CheckValidity, h);
  }
  SUBCASE("orphan value") {
    History h = Builder().Write(1, 3, 1, 1).Read(3, 77, 4, 5).h;
    Verdict v = CheckValidity(h);
    CHECK(v.witness == std::vector<int>{2});
    ExpectWitnessReplays(v, CheckValidity, h);
  }
  SUBCASE("pending and failed reads are ignored") {
    History h = Builder().Write(1, 3, 1, 1).Failed(2, 3).Read(3, kBottom, 4, std::nullopt).h;
    CHECK(CheckValidity(h).passed);
  }
  SUBCASE("pending write is concurrent with later reads") {
    CHECK(CheckValidity(Builder().Write(1, 3, 1, std::nullopt).Read(2, 3, 5, 6).h).passed);
  }
}

TEST_CASE("duplicate or bottom writes are input errors") {
  History dup = Builder().Write(1, 3, 1, 1).Write(2, 3, 2, 2).h;
  CHECK_THROWS_AS(CheckValidity(dup), CheckerInputError);
  CHECK_THROWS_AS(CheckOrdering(dup), CheckerInputError);
  CHECK_THROWS_AS(BruteForceLinearizable(dup), CheckerInputError);
  History bottom = Builder().Write(1, 3, 1, 1).h;
  bottom.operations[0].argument = Value::Bottom();
  CHECK_THROWS_AS(CheckValidity(bottom), CheckerInputError);
}

TEST_CASE("ordering examples") {
  SUBCASE("crossed reads fail") {
    History h = CrossedReads();
    CHECK(CheckValidity(h).passed);
    Verdict v = CheckOrdering(h);
    ExpectWitnessReplays(v, CheckOrdering, h);
    auto bf = BruteForceLinearizable(h);
    REQUIRE(bf.has_value());
    CHECK_FALSE(bf->passed);
  }
  SUBCASE("sequential history passes") {
    History h = Builder().Write(1, 1, 1, 1).Read(2, 1, 2, 3).Write(1, 2, 4, 4).Read(2, 2, 5, 6).h;
    CHECK(CheckOrdering(h).passed);
    CHECK(BruteForceLinearizable(h)->passed);
  }
  SUBCASE("empty history passes") {
    CHECK(CheckOrdering(History{}).passed);
    CHECK(BruteForceLinearizable(History{})->passed);
  }
  SUBCASE("concurrent read of bottom passes") {
    History h = Builder().Write(1, 1, 2, 2).Read(2, kBottom, 1, 2).h;
    CHECK(CheckOrdering(h).passed);
    CHECK(BruteForceLinearizable(h)->passed);
  }
  SUBCASE("orphan read") {
    History h = Builder().Write(1, 1, 1, 1).Read(2, 9, 2, 3).h;
    Verdict v = CheckOrdering(h);
    CHECK(v.witness == std::vector<int>{2});
    ExpectWitnessReplays(v, CheckOrdering, h);
  }
  SUBCASE("read finishing before its write starts") {
    History h = Builder().Read(2, 1, 1, 2).Write(1, 1, 3, 3).h;
    Verdict v = CheckOrdering(h);
    CHECK(v.witness == std::vector<int>{1, 2});
    ExpectWitnessReplays(v, CheckOrdering, h);
  }
  SUBCASE("new-old inversion between concurrent reads") {
    // Both reads overlap the write; the first sees the new value, the
    // second (strictly later) the old one.
    History h = Builder().Write(1, 1, 1, 1).Write(2, 2, 3, 6).Read(3, 2, 3, 4).Read(4, 1, 5, 6).h;
    CHECK(CheckValidity(h).passed);
    Verdict v = CheckOrdering(h);
    ExpectWitnessReplays(v, CheckOrdering, h);
    CHECK_FALSE(BruteForceLinearizable(h)->passed);
  }
  SUBCASE("bottom after a completed write") {
    History h = Builder().Write(1, 1, 1, 1).Read(2, 1, 2, 3).Read(3, kBottom, 4, 5).h;
    ExpectWitnessReplays(CheckOrdering(h), CheckOrdering, h);
  }
  SUBCASE("pending write may take effect") {
    History h = Builder().Write(1, 1, 1, std::nullopt).Read(2, 1, 3, 4).h;
    CHECK(CheckOrdering(h).passed);
    CHECK(BruteForceLinearizable(h)->passed);
  }
}

TEST_CASE("brute force refuses large histories") {
  Builder b;
  for (int i = 0; i < 10; ++i) b.Write(i + 1, i + 1, i + 1, i + 1);
  CHECK_FALSE(BruteForceLinearizable(b.h).has_value());
  b.h.operations.pop_back();
  CHECK(BruteForceLinearizable(b.h).has_value());
}

TEST_CASE("checkers agree with the reference oracles on random histories") {
  std::mt19937_64 rng(2024);
  int pass = 0, fail = 0;
  for (int i = 0; i < 1000; ++i) {
    const History h = oracle::RandomHistory(rng, 7);
    const bool lin = oracle::Linearizable(h);
    CAPTURE(i);
    const Verdict ord = CheckOrdering(h);
    CHECK(ord.passed == lin);
    CHECK(BruteForceLinearizable(h)->passed == lin);
    CHECK(CheckValidity(h).passed == oracle::Valid(h));
    if (ord.passed) {
      CHECK(CheckValidity(h).passed);
      ++pass;
    } else {
      ++fail;
      CHECK_FALSE(CheckOrdering(SubHistory(h, ord.witness)).passed);
    }
    const Verdict val = CheckValidity(h);
    if (!val.passed) CHECK_FALSE(CheckValidity(SubHistory(h, val.witness)).passed);
  }
  // The generator has to exercise both outcomes for the comparison to mean
  // anything.
  CHECK(pass > 100);
  CHECK(fail > 100);
}

TEST_CASE("check all bundles the three properties") {
  auto all = CheckAll(CrossedReads());
  REQUIRE(all.size() == 3);
  CHECK(all[0].property == "termination");
  CHECK(all[1].property == "validity");
  CHECK(all[2].property == "ordering");
  CHECK(all[0].passed);
  CHECK(all[1].passed);
  CHECK_FALSE(all[2].passed);
}
