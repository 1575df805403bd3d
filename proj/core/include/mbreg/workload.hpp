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

#ifndef MBREG_WORKLOAD_HPP_
#define MBREG_WORKLOAD_HPP_

#include <cstdint>
#include <set>
#include <vector>

#include "mbreg/types.hpp"

namespace mbreg {

/// An operation scheduled to send its first message in `round`.
struct Directive {
  enum class Kind { kWrite, kRead, kCrash };

  Round round = 1;
  ClientId client;
  Kind kind = Kind::kRead;
  Value value;

  friend bool operator==(const Directive&, const Directive&) = default;
};

struct Workload {
  std::vector<Directive> directives;
};

/// Rejects directives that overlap an in-flight operation of the same client
/// (writes occupy one round, reads two), follow a crash, fall outside
/// [1, rounds] or cannot finish by `rounds`, name an unknown client, or write
/// bottom or a value already written. Throws ConfigError.
void ValidateWorkload(const Workload& workload, int clients, Round rounds);

struct RandomWorkloadParams {
  /// Chance that an idle client starts an operation in a given round.
  double op_probability = 0.2;
  double read_ratio = 0.5;
  /// Cap on writes sharing one round; 0 disables it.
  int max_writers_per_round = 4;
  /// Chance per idle client and round of a terminal crash.
  double crash_probability = 0.0;
};

/// Seeded generator. Written values are unique per (client, counter).
Workload GenerateRandomWorkload(int clients, Round rounds, std::uint64_t seed,
                                const RandomWorkloadParams& params);

Value UniqueWriteValue(ClientId client, int counter);

std::set<ClientId> CrashedClients(const Workload& workload);

}  // namespace mbreg

#endif  // MBREG_WORKLOAD_HPP_
