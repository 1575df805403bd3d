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

#include "mbreg/trace.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace mbreg {

std::string_view ToString(TracePhase phase) {
  switch (phase) {
    case TracePhase::kSetup:
      return "setup";
    case TracePhase::kSend:
      return "send";
    case TracePhase::kReceive:
      return "receive";
    case TracePhase::kCompute:
      return "compute";
  }
  return "unknown";
}

std::string_view ToString(TraceKind kind) {
  switch (kind) {
    case TraceKind::kSend:
      return "send";
    case TraceKind::kDeliver:
      return "deliver";
    case TraceKind::kStateTransition:
      return "state_transition";
    case TraceKind::kFaultMove:
      return "fault_move";
    case TraceKind::kProbe:
      return "probe";
    case TraceKind::kOpInvoke:
      return "op_invoke";
    case TraceKind::kOpResponse:
      return "op_response";
    case TraceKind::kViolation:
      return "violation";
  }
  return "unknown";
}

std::string FormatTraceLine(const TraceEvent& event) {
  std::string line = "{\"round\":" + std::to_string(event.round) +
                     ",\"phase\":\"" + std::string(ToString(event.phase)) +
                     "\",\"kind\":\"" + std::string(ToString(event.kind)) +
                     "\",\"actor\":" + nlohmann::json(event.actor).dump() +
                     ",\"payload\":" + event.payload + "}";
  return line;
}

void StreamTraceSink::Emit(const TraceEvent& event) {
  out_ << FormatTraceLine(event) << '\n';
}

void HashingTraceSink::Emit(const TraceEvent& event) {
  const std::string line = FormatTraceLine(event) + "\n";
  for (unsigned char ch : line) {
    hash_ ^= ch;
    hash_ *= 1099511628211ULL;
  }
  ++lines_;
  bytes_ += line.size();
}

}  // namespace mbreg
