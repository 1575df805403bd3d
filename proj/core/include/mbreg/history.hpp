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

#ifndef MBREG_HISTORY_HPP_
#define MBREG_HISTORY_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "mbreg/types.hpp"

namespace mbreg {

enum class OpKind { kWrite, kRead };

/// One register operation. Times are round numbers: `invoke` is the round in
/// which the operation's first message is sent, `response` the round in
/// which the client returned.
struct Operation {
  int id = 0;
  ClientId client;
  OpKind kind = OpKind::kWrite;
  /// Written value (writes only).
  Value argument;
  /// Returned value (successful reads only).
  std::optional<Value> result;
  Round invoke = 0;
  std::optional<Round> response;
  /// The read completed its reply round without a selectable value.
  bool failed = false;

  bool complete() const { return response.has_value() && !failed; }
  friend bool operator==(const Operation&, const Operation&) = default;
};

struct History {
  std::vector<Operation> operations;
  /// Clients that crashed, with the first round they no longer took part in.
  std::map<ClientId, Round> crashes;

  const Operation* Find(int op_id) const;
  friend bool operator==(const History&, const History&) = default;
};

/// Real-time precedence: a finished strictly before b started. Pending
/// operations never precede anything.
bool Precedes(const Operation& a, const Operation& b);

std::string_view ToString(OpKind kind);

/// Line-delimited records, one JSON object per line. Operations use
///   {"op_id","client","kind","arg","ret","invoke_round","response_round",
///    "failed"}
/// and crashes {"kind":"crash","client","round"}. Bottom is encoded as null.
void WriteHistoryJsonl(std::ostream& out, const History& history);
/// Throws CheckerInputError on malformed input.
History ReadHistoryJsonl(std::istream& in);

}  // namespace mbreg

#endif  // MBREG_HISTORY_HPP_
