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

#ifndef MBREG_TRACE_HPP_
#define MBREG_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mbreg/types.hpp"

namespace mbreg {

enum class TracePhase { kSetup, kSend, kReceive, kCompute };

enum class TraceKind {
  kSend,
  kDeliver,
  kStateTransition,
  kFaultMove,
  kProbe,
  kOpInvoke,
  kOpResponse,
  kViolation,
};

/// `payload` holds a serialized JSON value.
struct TraceEvent {
  Round round = 0;
  TracePhase phase = TracePhase::kSetup;
  TraceKind kind = TraceKind::kProbe;
  std::string actor;
  std::string payload = "{}";
};

std::string_view ToString(TracePhase phase);
std::string_view ToString(TraceKind kind);

/// {"round":..,"phase":..,"kind":..,"actor":..,"payload":..} on one line,
/// fields always in that order.
std::string FormatTraceLine(const TraceEvent& event);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void Emit(const TraceEvent& event) = 0;
};

class StreamTraceSink : public TraceSink {
 public:
  explicit StreamTraceSink(std::ostream& out) : out_(out) {}
  void Emit(const TraceEvent& event) override;

 private:
  std::ostream& out_;
};

class CollectingTraceSink : public TraceSink {
 public:
  void Emit(const TraceEvent& event) override { events_.push_back(event); }
  const std::vector<TraceEvent>& events() const { return events_; }

 private:
  std::vector<TraceEvent> events_;
};

/// FNV-1a over the formatted lines; equal digests for byte-identical traces.
class HashingTraceSink : public TraceSink {
 public:
  void Emit(const TraceEvent& event) override;
  std::uint64_t digest() const { return hash_; }
  std::uint64_t lines() const { return lines_; }
  std::uint64_t bytes() const { return bytes_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ULL;
  std::uint64_t lines_ = 0;
  std::uint64_t bytes_ = 0;
};

}  // namespace mbreg

#endif  // MBREG_TRACE_HPP_
