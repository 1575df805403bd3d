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

#include "mbreg/workload.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "mbreg/errors.hpp"
#include "mbreg/rng.hpp"

namespace mbreg {
namespace {

std::string Where(const Directive& d) {
  return "directive at round " + std::to_string(d.round) + " for " +
         ToString(d.client);
}

Round Duration(Directive::Kind kind) {
  return kind == Directive::Kind::kRead ? 2 : 1;
}

}  // namespace

void ValidateWorkload(const Workload& workload, int clients, Round rounds) {
  std::map<ClientId, std::vector<const Directive*>> per_client;
  std::set<Value> written;
  for (const auto& d : workload.directives) {
    if (d.client.index < 1 || d.client.index > clients) {
      throw ConfigError(Where(d) + ": unknown client");
    }
    if (d.round < 1 || d.round > rounds) {
      throw ConfigError(Where(d) + ": round outside [1, " +
                        std::to_string(rounds) + "]");
    }
    if (d.kind != Directive::Kind::kCrash &&
        d.round + Duration(d.kind) - 1 > rounds) {
      throw ConfigError(Where(d) + ": operation cannot finish by round " +
                        std::to_string(rounds));
    }
    if (d.kind == Directive::Kind::kWrite) {
      if (d.value.is_bottom()) throw ConfigError(Where(d) + ": writes bottom");
      if (!written.insert(d.value).second) {
        throw ConfigError(Where(d) + ": value " + ToString(d.value) +
                          " is written twice");
      }
    }
    per_client[d.client].push_back(&d);
  }
  for (auto& [client, list] : per_client) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Directive* a, const Directive* b) {
                       return a->round < b->round;
                     });
    Round free_from = 1;
    bool crashed = false;
    for (const Directive* d : list) {
      if (crashed) throw ConfigError(Where(*d) + ": client already crashed");
      if (d->kind == Directive::Kind::kCrash) {
        crashed = true;
        continue;
      }
      if (d->round < free_from) {
        throw ConfigError(Where(*d) +
                          ": overlaps an operation still in flight");
      }
      free_from = d->round + Duration(d->kind);
    }
  }
}

Value UniqueWriteValue(ClientId client, int counter) {
  return Value::Of(static_cast<std::int64_t>(client.index) * 1'000'000 +
                   counter);
}

Workload GenerateRandomWorkload(int clients, Round rounds, std::uint64_t seed,
                                const RandomWorkloadParams& params) {
  Workload w;
  Rng rng = Rng(seed).Stream("workload", 0, 0);
  std::vector<Round> free_from(clients + 1, 1);
  std::vector<int> counter(clients + 1, 0);
  std::vector<bool> crashed(clients + 1, false);
  for (Round r = 1; r <= rounds; ++r) {
    int writers = 0;
    for (int c = 1; c <= clients; ++c) {
      if (crashed[c] || free_from[c] > r) continue;
      if (params.crash_probability > 0 && rng.Bernoulli(params.crash_probability)) {
        crashed[c] = true;
        w.directives.push_back({r, ClientId{c}, Directive::Kind::kCrash, {}});
        continue;
      }
      if (!rng.Bernoulli(params.op_probability)) continue;
      const bool read = rng.Bernoulli(params.read_ratio);
      if (read) {
        if (r + 1 > rounds) continue;
        w.directives.push_back({r, ClientId{c}, Directive::Kind::kRead, {}});
        free_from[c] = r + 2;
      } else {
        if (params.max_writers_per_round > 0 &&
            writers >= params.max_writers_per_round) {
          continue;
        }
        ++writers;
        w.directives.push_back({r, ClientId{c}, Directive::Kind::kWrite,
                                UniqueWriteValue(ClientId{c}, ++counter[c])});
        free_from[c] = r + 1;
      }
    }
  }
  return w;
}

std::set<ClientId> CrashedClients(const Workload& workload) {
  std::set<ClientId> out;
  for (const auto& d : workload.directives) {
    if (d.kind == Directive::Kind::kCrash) out.insert(d.client);
  }
  return out;
}

}  // namespace mbreg
