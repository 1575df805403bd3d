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

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mbreg/sim.hpp"

namespace mbreg {
namespace {

constexpr std::int64_t kWritten = 1;
constexpr std::int64_t kLie = 2;
constexpr Round kWriteRound = 1;
constexpr Round kReadRound = 3;

std::set<ServerId> Range(int first, int last) {
  std::set<ServerId> out;
  for (int i = first; i <= last; ++i) out.insert(ServerId{i});
  return out;
}

}  // namespace

SimOptions TightnessOptions(ModelId model, int f) {
  const ModelParams params = Lookup(model);
  const int n = params.alpha * f;
  SimOptions opt;
  opt.config = MakeConfig(model, n, f);
  opt.clients = 2;
  opt.rounds = kReadRound + 1;
  opt.seed = 1;
  opt.allow_inadmissible = true;
  opt.workload.directives = {
      {kWriteRound, ClientId{1}, Directive::Kind::kWrite, Value::Of(kWritten)},
      {kReadRound, ClientId{2}, Directive::Kind::kRead, {}},
  };

  Strategy& st = opt.strategy;
  st.kind = Strategy::Kind::kScripted;
  st.scripted_policy = MessagePolicy::kSplitVote;
  st.lie = Value::Of(kLie);
  switch (model) {
    case ModelId::kGaray:
      // Cured and silent in the reply round, plus f fresh liars.
      st.script[kReadRound].occupied = Range(f + 1, 2 * f);
      st.script[kReadRound + 1].occupied = Range(2 * f + 1, 3 * f);
      break;
    case ModelId::kBonnet:
    case ModelId::kSasaki:
      st.script[kReadRound].occupied = Range(2 * f + 1, 3 * f);
      st.script[kReadRound + 1].occupied = Range(3 * f + 1, 4 * f);
      break;
    case ModelId::kBuhrman:
      st.script[1].occupied = Range(1, f);
      for (int i = 1; i <= f; ++i) {
        st.script[2].moves.push_back({ServerId{i}, ServerId{f + i}});
      }
      break;
  }
  return opt;
}

TightnessReport TightnessDemo(ModelId model, int f, TraceSink* trace) {
  SimOptions opt = TightnessOptions(model, f);
  opt.trace = trace;
  TightnessReport rep;
  rep.model = model;
  rep.f = f;
  rep.n = opt.config.n;
  rep.written = Value::Of(kWritten);
  rep.lie = Value::Of(kLie);
  rep.read_round = kReadRound + 1;
  rep.sim = Run(opt);
  rep.threshold = rep.sim.threshold;

  const auto& failures = rep.sim.probes.read_failures;
  rep.protocol_failure = !failures.empty();
  if (rep.protocol_failure) {
    const auto& ev = failures.front();
    rep.reply_tally = ev.failure.Tally();
    rep.silent = ev.silent();
  }
  auto support = [&](Value v) {
    auto it = rep.reply_tally.find(v);
    return it == rep.reply_tally.end() ? 0 : it->second;
  };
  rep.written_support = support(rep.written);
  rep.lie_support = support(rep.lie);
  std::vector<int> counts;
  for (const auto& [v, c] : rep.reply_tally) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  rep.ambiguous = counts.size() >= 2 && counts[0] == counts[1];
  return rep;
}

std::string FormatTightnessReport(const TightnessReport& r) {
  std::ostringstream out;
  out << ModelLabel(r.model) << " (" << ModelName(r.model) << ") f=" << r.f
      << " n=" << r.n << " threshold=" << r.threshold << "\n";
  out << "  write " << ToString(r.written) << " by c1 in round 1, read by c2"
      << " collecting replies in round " << r.read_round << "\n";
  out << "  replies:";
  for (const auto& [v, c] : r.reply_tally) {
    out << " " << ToString(v) << " x" << c;
  }
  out << ", silent " << r.silent << "\n";
  out << "  written=" << r.written_support << " lie=" << r.lie_support
      << " ambiguous=" << (r.ambiguous ? "yes" : "no")
      << " protocol_failure=" << (r.protocol_failure ? "yes" : "no") << "\n";
  return out.str();
}

std::string TightnessReportToJson(const TightnessReport& r) {
  nlohmann::ordered_json j;
  j["model"] = std::string(ModelName(r.model));
  j["label"] = std::string(ModelLabel(r.model));
  j["f"] = r.f;
  j["n"] = r.n;
  j["threshold"] = r.threshold;
  j["written"] = r.written.raw();
  j["lie"] = r.lie.raw();
  j["read_round"] = r.read_round;
  nlohmann::ordered_json tally = nlohmann::ordered_json::array();
  for (const auto& [v, c] : r.reply_tally) {
    tally.push_back({{"value", v.is_bottom() ? nlohmann::ordered_json(nullptr)
                                             : nlohmann::ordered_json(v.raw())},
                     {"count", c}});
  }
  j["reply_tally"] = tally;
  j["silent"] = r.silent;
  j["written_support"] = r.written_support;
  j["lie_support"] = r.lie_support;
  j["ambiguous"] = r.ambiguous;
  j["protocol_failure"] = r.protocol_failure;
  return j.dump(2);
}

}  // namespace mbreg
