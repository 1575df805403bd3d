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

#include "mbreg/checker.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

std::string OpLabel(const Operation& op) {
  std::string out = "op" + std::to_string(op.id) + " " +
                    std::string(ToString(op.kind)) + "(";
  if (op.kind == OpKind::kWrite) {
    out += ToString(op.argument);
  } else if (op.result) {
    out += ToString(*op.result);
  }
  out += ")@" + std::to_string(op.invoke) + "-";
  out += op.response ? std::to_string(*op.response) : std::string("pending");
  return out;
}

// Write value -> write. Rejects bottom and duplicate values.
std::map<Value, const Operation*> IndexWrites(const History& history) {
  std::map<Value, const Operation*> writes;
  for (const auto& op : history.operations) {
    if (op.kind != OpKind::kWrite) continue;
    if (op.argument.is_bottom()) {
      throw CheckerInputError(OpLabel(op) + " writes bottom");
    }
    if (!writes.emplace(op.argument, &op).second) {
      throw CheckerInputError("value " + ToString(op.argument) +
                              " is written more than once");
    }
  }
  return writes;
}

bool CompletedRead(const Operation& op) {
  return op.kind == OpKind::kRead && op.complete() && op.result.has_value();
}

Verdict Pass(std::string property) {
  Verdict v;
  v.property = std::move(property);
  return v;
}

Verdict Fail(std::string property, std::vector<int> witness,
             std::string detail) {
  Verdict v;
  v.property = std::move(property);
  v.passed = false;
  std::sort(witness.begin(), witness.end());
  witness.erase(std::unique(witness.begin(), witness.end()), witness.end());
  v.witness = std::move(witness);
  v.detail = std::move(detail);
  return v;
}

}  // namespace

Verdict CheckTermination(const History& history) {
  std::vector<int> stuck;
  std::string detail;
  for (const auto& op : history.operations) {
    if (history.crashes.count(op.client) || op.complete()) continue;
    stuck.push_back(op.id);
    if (detail.empty()) {
      detail = OpLabel(op) + (op.failed ? " returned no value"
                                        : " never returned") +
               " and " + ToString(op.client) + " did not crash";
    }
  }
  if (stuck.empty()) return Pass("termination");
  if (stuck.size() > 1) {
    detail += " (" + std::to_string(stuck.size()) + " operations in total)";
  }
  return Fail("termination", stuck, detail);
}

Verdict CheckTermination(const History& history, const Workload& workload) {
  History merged = history;
  for (const auto& d : workload.directives) {
    if (d.kind == Directive::Kind::kCrash && !merged.crashes.count(d.client)) {
      merged.crashes[d.client] = d.round;
    }
  }
  return CheckTermination(merged);
}

Verdict CheckValidity(const History& history) {
  const auto writes = IndexWrites(history);
  for (const auto& r : history.operations) {
    if (!CompletedRead(r)) continue;
    const Value got = *r.result;

    std::vector<const Operation*> preceding;
    for (const auto& w : history.operations) {
      if (w.kind == OpKind::kWrite && Precedes(w, r)) preceding.push_back(&w);
    }

    if (got.is_bottom()) {
      if (preceding.empty()) continue;
      return Fail("validity", {r.id, preceding.front()->id},
                  OpLabel(r) + " returned bottom after " +
                      OpLabel(*preceding.front()) + " completed");
    }

    auto it = writes.find(got);
    if (it == writes.end()) {
      return Fail("validity", {r.id},
                  OpLabel(r) + " returned a value nobody wrote");
    }
    const Operation& w = *it->second;
    if (Precedes(r, w)) {
      return Fail("validity", {r.id, w.id},
                  OpLabel(r) + " returned the value of the later " +
                      OpLabel(w));
    }
    if (!Precedes(w, r)) continue;  // concurrent write
    for (const Operation* newer : preceding) {
      if (Precedes(w, *newer)) {
        return Fail("validity", {r.id, w.id, newer->id},
                    OpLabel(r) + " returned " + OpLabel(w) +
                        ", overwritten by " + OpLabel(*newer));
      }
    }
  }
  return Pass("validity");
}

Verdict CheckOrdering(const History& history) {
  const auto writes = IndexWrites(history);

  // Cluster 0 holds the fictional initial write and the reads of bottom.
  std::map<Value, int> cluster_of_value;
  std::vector<const Operation*> cluster_write{nullptr};
  for (const auto& [value, w] : writes) {
    cluster_of_value[value] = static_cast<int>(cluster_write.size());
    cluster_write.push_back(w);
  }

  struct Member {
    const Operation* op;
    int cluster;
  };
  std::vector<Member> members;
  for (const auto& op : history.operations) {
    if (op.kind == OpKind::kWrite) {
      members.push_back({&op, cluster_of_value.at(op.argument)});
      continue;
    }
    if (!CompletedRead(op)) continue;
    if (op.result->is_bottom()) {
      members.push_back({&op, 0});
      continue;
    }
    auto it = cluster_of_value.find(*op.result);
    if (it == cluster_of_value.end()) {
      return Fail("ordering", {op.id},
                  OpLabel(op) + " returned a value nobody wrote");
    }
    const Operation& w = *cluster_write[it->second];
    if (Precedes(op, w)) {
      return Fail("ordering", {op.id, w.id},
                  OpLabel(op) + " finished before its " + OpLabel(w) +
                      " started");
    }
    members.push_back({&op, it->second});
  }

  // Edge a->b between clusters, remembering one realizing pair of ops.
  const int k = static_cast<int>(cluster_write.size());
  std::vector<std::map<int, std::pair<const Operation*, const Operation*>>> adj(k);
  for (const auto& a : members) {
    for (const auto& b : members) {
      if (a.cluster == b.cluster) continue;
      if (Precedes(*a.op, *b.op) && !adj[a.cluster].count(b.cluster)) {
        adj[a.cluster][b.cluster] = {a.op, b.op};
      }
    }
  }
  // The initial write precedes everything.
  for (int c = 1; c < k; ++c) {
    if (!adj[0].count(c)) adj[0][c] = {nullptr, nullptr};
  }

  std::vector<int> color(k, 0), parent(k, -1);
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    color[u] = 1;
    for (const auto& [v, _] : adj[u]) {
      if (color[v] == 1) {
        cycle = {v};
        for (int x = u; x != v; x = parent[x]) cycle.push_back(x);
        std::reverse(cycle.begin() + 1, cycle.end());
        return true;
      }
      if (color[v] == 0) {
        parent[v] = u;
        if (dfs(v)) return true;
      }
    }
    color[u] = 2;
    return false;
  };
  for (int c = 0; c < k && cycle.empty(); ++c) {
    if (color[c] == 0) dfs(c);
  }
  if (cycle.empty()) return Pass("ordering");

  std::vector<int> witness;
  std::string detail = "precedence cycle between clusters:";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const int from = cycle[i];
    const int to = cycle[(i + 1) % cycle.size()];
    const auto& [a, b] = adj[from].at(to);
    if (cluster_write[from]) witness.push_back(cluster_write[from]->id);
    if (a) {
      witness.push_back(a->id);
      witness.push_back(b->id);
      detail += " " + OpLabel(*a) + " < " + OpLabel(*b) + ";";
    } else {
      detail += " initial bottom < " +
                (cluster_write[to] ? OpLabel(*cluster_write[to])
                                   : std::string("bottom")) + ";";
    }
  }
  return Fail("ordering", witness, detail);
}

std::optional<Verdict> BruteForceLinearizable(const History& history) {
  IndexWrites(history);
  std::vector<const Operation*> ops;
  for (const auto& op : history.operations) {
    if (op.kind == OpKind::kWrite || CompletedRead(op)) ops.push_back(&op);
  }
  if (ops.size() > kBruteForceMaxOps) return std::nullopt;

  const int m = static_cast<int>(ops.size());
  std::vector<unsigned> preds(m, 0);
  unsigned required = 0;
  for (int i = 0; i < m; ++i) {
    if (ops[i]->response.has_value()) required |= 1u << i;
    for (int j = 0; j < m; ++j) {
      if (i != j && Precedes(*ops[j], *ops[i])) preds[i] |= 1u << j;
    }
  }

  // State: placed set plus index of the last placed write (-1 = bottom).
  std::set<std::pair<unsigned, int>> dead;
  std::function<bool(unsigned, int)> search = [&](unsigned placed,
                                                  int last) -> bool {
    if ((placed & required) == required) return true;
    if (dead.count({placed, last})) return false;
    const Value current = last < 0 ? Value::Bottom() : ops[last]->argument;
    for (int i = 0; i < m; ++i) {
      const unsigned bit = 1u << i;
      if ((placed & bit) || (preds[i] & ~placed)) continue;
      if (ops[i]->kind == OpKind::kWrite) {
        if (search(placed | bit, i)) return true;
      } else if (*ops[i]->result == current) {
        if (search(placed | bit, last)) return true;
      }
    }
    dead.insert({placed, last});
    return false;
  };

  if (search(0, -1)) return Pass("linearizability");
  std::vector<int> witness;
  for (const auto* op : ops) witness.push_back(op->id);
  return Fail("linearizability", witness,
              "no sequential order of the " + std::to_string(m) +
                  " operations respects precedence and register semantics");
}

History SubHistory(const History& history, const std::vector<int>& op_ids) {
  const std::unordered_set<int> keep(op_ids.begin(), op_ids.end());
  History out;
  out.crashes = history.crashes;
  for (const auto& op : history.operations) {
    if (keep.count(op.id)) out.operations.push_back(op);
  }
  return out;
}

std::vector<Verdict> CheckAll(const History& history) {
  return {CheckTermination(history), CheckValidity(history),
          CheckOrdering(history)};
}

}  // namespace mbreg
