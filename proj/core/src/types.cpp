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

#include "mbreg/types.hpp"

#include <variant>

#include "mbreg/message.hpp"

namespace mbreg {

std::string ToString(Value v) {
  return v.is_bottom() ? std::string("bottom") : std::to_string(v.raw());
}

std::string ToString(ServerId s) { return "s" + std::to_string(s.index); }

std::string ToString(ClientId c) { return "c" + std::to_string(c.index); }

std::string ToString(ProcessId p) {
  return p.is_server() ? ToString(ServerId{p.index})
                       : ToString(ClientId{p.index});
}

std::string_view MessageKind(const Message& msg) {
  struct Visitor {
    std::string_view operator()(const EchoMsg&) const { return "echo"; }
    std::string_view operator()(const WriteMsg&) const { return "write"; }
    std::string_view operator()(const ReadMsg&) const { return "read"; }
    std::string_view operator()(const ReplyMsg&) const { return "reply"; }
  };
  return std::visit(Visitor{}, msg);
}

ProcessId ClaimedSender(const Message& msg) {
  struct Visitor {
    ProcessId operator()(const EchoMsg& m) const {
      return ProcessId::Of(m.server);
    }
    ProcessId operator()(const WriteMsg& m) const {
      return ProcessId::Of(m.client);
    }
    ProcessId operator()(const ReadMsg& m) const {
      return ProcessId::Of(m.client);
    }
    ProcessId operator()(const ReplyMsg& m) const {
      return ProcessId::Of(m.server);
    }
  };
  return std::visit(Visitor{}, msg);
}

std::string ToString(const Message& msg) {
  struct Visitor {
    std::string operator()(const EchoMsg& m) const {
      return "ECHO(" + ToString(m.value) + "," + ToString(m.server) + ")";
    }
    std::string operator()(const WriteMsg& m) const {
      return "WRITE(" + ToString(m.value) + "," + ToString(m.client) + ")";
    }
    std::string operator()(const ReadMsg& m) const {
      return "READ(" + ToString(m.client) + ")";
    }
    std::string operator()(const ReplyMsg& m) const {
      return "REPLY(" + ToString(m.value) + "," + ToString(m.server) + ")";
    }
  };
  return std::visit(Visitor{}, msg);
}

std::vector<Envelope> Expand(ProcessId from, const std::vector<Outgoing>& out,
                             int servers) {
  std::vector<Envelope> envelopes;
  for (const auto& o : out) {
    if (o.to.kind == Destination::Kind::kAllServers) {
      for (int s = 1; s <= servers; ++s) {
        envelopes.push_back({from, ProcessId::Of(ServerId{s}), o.msg});
      }
    } else {
      envelopes.push_back({from, ProcessId::Of(o.to.client), o.msg});
    }
  }
  return envelopes;
}

}  // namespace mbreg
