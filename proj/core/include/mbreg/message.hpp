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

#ifndef MBREG_MESSAGE_HPP_
#define MBREG_MESSAGE_HPP_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbreg/types.hpp"

namespace mbreg {

/// Server-to-server maintenance broadcast of the stored value.
struct EchoMsg {
  Value value;
  ServerId server;
  friend constexpr auto operator<=>(const EchoMsg&, const EchoMsg&) = default;
};

struct WriteMsg {
  Value value;
  ClientId client;
  friend constexpr auto operator<=>(const WriteMsg&,
                                    const WriteMsg&) = default;
};

struct ReadMsg {
  ClientId client;
  friend constexpr auto operator<=>(const ReadMsg&, const ReadMsg&) = default;
};

struct ReplyMsg {
  Value value;
  ServerId server;
  friend constexpr auto operator<=>(const ReplyMsg&,
                                    const ReplyMsg&) = default;
};

using Message = std::variant<EchoMsg, WriteMsg, ReadMsg, ReplyMsg>;

std::string_view MessageKind(const Message& msg);

/// The identity the payload claims for its sender. Channels are
/// authenticated, so the network drops any message whose claimed sender
/// differs from the channel sender.
ProcessId ClaimedSender(const Message& msg);

std::string ToString(const Message& msg);

/// Where a protocol-level send goes: a broadcast to every server or a
/// point-to-point message to one client.
struct Destination {
  enum class Kind { kAllServers, kClient };
  Kind kind = Kind::kAllServers;
  ClientId client;

  static constexpr Destination AllServers() { return {}; }
  static constexpr Destination To(ClientId c) { return {Kind::kClient, c}; }

  friend constexpr auto operator<=>(const Destination&,
                                    const Destination&) = default;
};

struct Outgoing {
  Destination to;
  Message msg;
  friend constexpr auto operator<=>(const Outgoing&,
                                    const Outgoing&) = default;
};

/// A delivered message together with its authenticated sender.
struct Inbound {
  ProcessId sender;
  Message msg;
  friend constexpr auto operator<=>(const Inbound&, const Inbound&) = default;
};

struct Envelope {
  ProcessId from;
  ProcessId to;
  Message msg;
  friend constexpr auto operator<=>(const Envelope&,
                                    const Envelope&) = default;
};

/// Resolves protocol-level destinations into one envelope per recipient.
std::vector<Envelope> Expand(ProcessId from, const std::vector<Outgoing>& out,
                             int servers);

}  // namespace mbreg

#endif  // MBREG_MESSAGE_HPP_
