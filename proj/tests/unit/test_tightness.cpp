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

#include "mbreg/sim.hpp"
#include "oracles/model_oracles.hpp"

using namespace mbreg;

TEST_CASE("split-vote construction at n = alpha f") {
  for (ModelId m : kAllModels) {
    for (int f = 1; f <= 3; ++f) {
      CAPTURE(ModelName(m));
      CAPTURE(f);
      const TightnessReport r = TightnessDemo(m, f);
      const auto expect = oracle::ExpectedSplit(m, f);
      const int n = oracle::RowOf(m).alpha * f;
      CHECK(r.n == n);
      CHECK(r.threshold == n - oracle::RowOf(m).beta * f);
      CHECK(r.written_support == expect.written);
      CHECK(r.lie_support == expect.lie);
      CHECK(r.silent == expect.silent);
      CHECK(r.written_support == r.lie_support);
      CHECK(r.written_support >= r.threshold);
      CHECK(r.ambiguous);
      CHECK(r.protocol_failure);
      CHECK(r.sim.probes.CountViolations("protocol_failure") == 1);
      CHECK_FALSE(r.sim.admissible);
    }
  }
}

TEST_CASE("exact counts for f = 2") {
  auto counts = [](ModelId m) {
    const TightnessReport r = TightnessDemo(m, 2);
    return std::tuple{r.written_support, r.lie_support, r.silent};
  };
  CHECK(counts(ModelId::kGaray) == std::tuple{2, 2, 2});
  CHECK(counts(ModelId::kBonnet) == std::tuple{4, 4, 0});
  CHECK(counts(ModelId::kSasaki) == std::tuple{4, 4, 0});
  CHECK(counts(ModelId::kBuhrman) == std::tuple{2, 2, 0});
}

TEST_CASE("the same schedule one server above the bound is harmless") {
  for (ModelId m : kAllModels) {
    SimOptions o = TightnessOptions(m, 2);
    o.config = MakeConfig(m, o.config.n + 1, 2);
    o.allow_inadmissible = false;
    const SimResult r = Run(o);
    CAPTURE(ModelName(m));
    CHECK(r.probes.read_failures.empty());
    REQUIRE(r.history.operations.size() == 2);
    CHECK(r.history.operations[1].result == Value::Of(1));
  }
}

TEST_CASE("tightness reports render") {
  const TightnessReport r = TightnessDemo(ModelId::kGaray, 2);
  const std::string text = FormatTightnessReport(r);
  CHECK(text.find("M1 (garay) f=2 n=6 threshold=2") != std::string::npos);
  CHECK(text.find("silent 2") != std::string::npos);
  const auto j = nlohmann::json::parse(TightnessReportToJson(r));
  CHECK(j["ambiguous"] == true);
  CHECK(j["reply_tally"].size() == 2);
}
