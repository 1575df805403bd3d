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

#ifndef MBREG_TYPES_HPP_
#define MBREG_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <string>

namespace mbreg {

using Round = std::int64_t;

/// Register payload. The default-constructed value is bottom, the initial
/// content of the register; it orders before every written value.
class Value {
 public:
  constexpr Value() = default;

  static constexpr Value Bottom() { return Value(); }
  static constexpr Value Of(std::int64_t raw) {
    Value v;
    v.defined_ = true;
    v.raw_ = raw;
    return v;
  }

  constexpr bool is_bottom() const { return !defined_; }
  constexpr std::int64_t raw() const { return raw_; }

  friend constexpr auto operator<=>(const Value&, const Value&) = default;
  friend constexpr bool operator==(const Value&, const Value&) = default;

 private:
  bool defined_ = false;
  std::int64_t raw_ = 0;
};

/// Servers are numbered s1..sn, clients c1..cm.
struct ServerId {
  int index = 0;
  friend constexpr auto operator<=>(ServerId, ServerId) = default;
};

struct ClientId {
  int index = 0;
  friend constexpr auto operator<=>(ClientId, ClientId) = default;
};

enum class ProcessKind { kServer, kClient };

/// Authenticated channel endpoint. Orders servers before clients, then by
/// index, which is also the deterministic inbox order.
struct ProcessId {
  ProcessKind kind = ProcessKind::kServer;
  int index = 0;

  static constexpr ProcessId Of(ServerId s) {
    return {ProcessKind::kServer, s.index};
  }
  static constexpr ProcessId Of(ClientId c) {
    return {ProcessKind::kClient, c.index};
  }
  constexpr bool is_server() const { return kind == ProcessKind::kServer; }
  constexpr bool is_client() const { return kind == ProcessKind::kClient; }

  friend constexpr auto operator<=>(ProcessId, ProcessId) = default;
};

std::string ToString(Value v);
std::string ToString(ServerId s);
std::string ToString(ClientId c);
std::string ToString(ProcessId p);

}  // namespace mbreg

#endif  // MBREG_TYPES_HPP_
