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

#ifndef MBREG_CHECKER_HPP_
#define MBREG_CHECKER_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbreg/history.hpp"
#include "mbreg/workload.hpp"

namespace mbreg {

/// Outcome of one property check. A failing verdict always names the
/// operations that witness the violation; the sub-history made of those
/// operations violates the property on its own.
struct Verdict {
  std::string property;
  bool passed = true;
  std::vector<int> witness;
  std::string detail;
};

/// Every operation of a client that did not crash returned a result.
Verdict CheckTermination(const History& history);
Verdict CheckTermination(const History& history, const Workload& workload);

/// Every read returns the value of a latest preceding write or of a
/// concurrent write, bottom when no write precedes it. Throws
/// CheckerInputError if two writes share a value or a write stores bottom.
Verdict CheckValidity(const History& history);

/// Linearizability for unique-value histories: each write and the reads of
/// its value form a cluster; the history is linearizable iff no read
/// precedes its own write and the precedence relation contracted on clusters
/// is acyclic. Throws CheckerInputError like CheckValidity.
Verdict CheckOrdering(const History& history);

inline constexpr std::size_t kBruteForceMaxOps = 9;

/// Enumerates every total order extending precedence. Returns nullopt
/// (refusal) above kBruteForceMaxOps operations.
std::optional<Verdict> BruteForceLinearizable(const History& history);

/// Restriction of `history` to the listed operations (crashes kept).
History SubHistory(const History& history, const std::vector<int>& op_ids);

std::vector<Verdict> CheckAll(const History& history);

}  // namespace mbreg

#endif  // MBREG_CHECKER_HPP_
