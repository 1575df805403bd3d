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

// Reference implementations written straight from the property definitions.
// They are slow on purpose and share no code with the checker.

#ifndef MBREG_TESTS_HISTORY_ORACLES_HPP_
#define MBREG_TESTS_HISTORY_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mbreg/history.hpp"

namespace mbreg::oracle {

inline constexpr Round kNever = std::numeric_limits<Round>::max();

inline Round End(const Operation& op) {
  return op.response ? *op.response : kNever;
}

inline bool Before(const Operation& a, const Operation& b) {
  return End(a) < b.invoke;
}

inline bool Returned(const Operation& op) {
  return op.kind == OpKind::kRead && op.response && !op.failed && op.result;
}

// Tries every permutation of every admissible op subset (pending writes are
// optional, pending and failed reads never take part).
inline bool Linearizable(const History& h) {
  std::vector<const Operation*> must, maybe;
  for (const auto& op : h.operations) {
    if (op.kind == OpKind::kWrite) {
      (op.response ? must : maybe).push_back(&op);
    } else if (Returned(op)) {
      must.push_back(&op);
    }
  }
  for (std::uint32_t mask = 0; mask < (1u << maybe.size()); ++mask) {
    std::vector<const Operation*> seq = must;
    for (std::size_t i = 0; i < maybe.size(); ++i) {
      if (mask & (1u << i)) seq.push_back(maybe[i]);
    }
    std::sort(seq.begin(), seq.end());
    do {
      bool ok = true;
      for (std::size_t i = 0; ok && i < seq.size(); ++i) {
        for (std::size_t j = i + 1; ok && j < seq.size(); ++j) {
          if (Before(*seq[j], *seq[i])) ok = false;
        }
      }
      Value reg = Value::Bottom();
      for (std::size_t i = 0; ok && i < seq.size(); ++i) {
        if (seq[i]->kind == OpKind::kWrite) {
          reg = seq[i]->argument;
        } else if (*seq[i]->result != reg) {
          ok = false;
        }
      }
      if (ok) return true;
    } while (std::next_permutation(seq.begin(), seq.end()));
  }
  return false;
}

// Each returned read yields bottom with no write before it, the value of a
// write that precedes it with no other write in between, or the value of a
// write overlapping it.
inline bool Valid(const History& h) {
  for (const auto& r : h.operations) {
    if (!Returned(r)) continue;
    bool any_before = false;
    bool ok = false;
    for (const auto& w : h.operations) {
      if (w.kind != OpKind::kWrite) continue;
      if (Before(w, r)) any_before = true;
      const bool overlaps = !Before(w, r) && !Before(r, w);
      bool latest = Before(w, r);
      for (const auto& w2 : h.operations) {
        if (w2.kind == OpKind::kWrite && Before(w, w2) && Before(w2, r)) {
          latest = false;
        }
      }
      if ((overlaps || latest) && w.argument == *r.result) ok = true;
    }
    if (!any_before && r.result->is_bottom()) ok = true;
    if (!ok) return false;
  }
  return true;
}

// Small random histories with unique written values. Intervals overlap
// often, some operations stay pending, some reads fail, and read results
// are drawn from the written values, bottom, or a value nobody wrote.
inline History RandomHistory(std::mt19937_64& rng, int max_ops) {
  std::uniform_int_distribution<int> count(1, max_ops);
  std::uniform_int_distribution<int> start(1, 6);
  std::uniform_int_distribution<int> length(0, 2);
  std::uniform_int_distribution<int> pct(0, 99);
  History h;
  const int k = count(rng);
  std::vector<Value> written;
  for (int i = 0; i < k; ++i) {
    Operation op;
    op.id = i + 1;
    op.client = ClientId{i + 1};
    op.kind = pct(rng) < 45 ? OpKind::kWrite : OpKind::kRead;
    op.invoke = start(rng);
    if (pct(rng) >= 8) op.response = op.invoke + length(rng);
    if (op.kind == OpKind::kWrite) {
      op.argument = Value::Of(100 + i);
      written.push_back(op.argument);
    }
    h.operations.push_back(op);
  }
  for (auto& op : h.operations) {
    if (op.kind != OpKind::kRead || !op.response) continue;
    const int p = pct(rng);
    if (p < 4) {
      op.failed = true;
    } else if (p < 20 || written.empty()) {
      op.result = Value::Bottom();
    } else if (p < 23) {
      op.result = Value::Of(999);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, written.size() - 1);
      op.result = written[pick(rng)];
    }
  }
  return h;
}

}  // namespace mbreg::oracle

#endif  // MBREG_TESTS_HISTORY_ORACLES_HPP_
