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

#include "mbreg/history.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

using nlohmann::ordered_json;

ordered_json ValueJson(Value v) {
  return v.is_bottom() ? ordered_json(nullptr) : ordered_json(v.raw());
}

Value ParseValue(const ordered_json& j, const std::string& where) {
  if (j.is_null()) return Value::Bottom();
  if (!j.is_number_integer()) {
    throw CheckerInputError(where + ": value must be an integer or null");
  }
  return Value::Of(j.get<std::int64_t>());
}

template <typename T>
T Required(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw CheckerInputError(where + ": missing field \"" + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CheckerInputError(where + ": field \"" + key + "\" has wrong type");
  }
}

}  // namespace

const Operation* History::Find(int op_id) const {
  for (const auto& op : operations) {
    if (op.id == op_id) return &op;
  }
  return nullptr;
}

bool Precedes(const Operation& a, const Operation& b) {
  return a.response.has_value() && *a.response < b.invoke;
}

std::string_view ToString(OpKind kind) {
  return kind == OpKind::kWrite ? "write" : "read";
}

void WriteHistoryJsonl(std::ostream& out, const History& history) {
  for (const auto& op : history.operations) {
    ordered_json j;
    j["op_id"] = op.id;
    j["client"] = op.client.index;
    j["kind"] = std::string(ToString(op.kind));
    j["arg"] = op.kind == OpKind::kWrite ? ValueJson(op.argument)
                                         : ordered_json(nullptr);
    j["ret"] = op.result ? ValueJson(*op.result) : ordered_json(nullptr);
    j["invoke_round"] = op.invoke;
    j["response_round"] =
        op.response ? ordered_json(*op.response) : ordered_json(nullptr);
    j["failed"] = op.failed;
    out << j.dump() << '\n';
  }
  for (const auto& [client, round] : history.crashes) {
    ordered_json j;
    j["kind"] = "crash";
    j["client"] = client.index;
    j["round"] = round;
    out << j.dump() << '\n';
  }
}

History ReadHistoryJsonl(std::istream& in) {
  History h;
  std::string line;
  int line_no = 0;
  std::set<int> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "history line " + std::to_string(line_no);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CheckerInputError(where + ": " + e.what());
    }
    if (!j.is_object()) throw CheckerInputError(where + ": not an object");
    const auto kind = Required<std::string>(j, "kind", where);
    const int client = Required<int>(j, "client", where);
    if (client < 1) throw CheckerInputError(where + ": client ids start at 1");
    if (kind == "crash") {
      h.crashes[ClientId{client}] = Required<Round>(j, "round", where);
      continue;
    }
    Operation op;
    op.client = ClientId{client};
    if (kind == "write") {
      op.kind = OpKind::kWrite;
    } else if (kind == "read") {
      op.kind = OpKind::kRead;
    } else {
      throw CheckerInputError(where + ": unknown kind \"" + kind + "\"");
    }
    op.id = Required<int>(j, "op_id", where);
    if (!ids.insert(op.id).second) {
      throw CheckerInputError(where + ": duplicate op_id " +
                              std::to_string(op.id));
    }
    op.invoke = Required<Round>(j, "invoke_round", where);
    if (j.contains("arg")) op.argument = ParseValue(j["arg"], where);
    if (op.kind == OpKind::kWrite && !j.contains("arg")) {
      throw CheckerInputError(where + ": write without \"arg\"");
    }
    if (j.contains("response_round") && !j["response_round"].is_null()) {
      op.response = Required<Round>(j, "response_round", where);
      if (*op.response < op.invoke) {
        throw CheckerInputError(where + ": response before invocation");
      }
    }
    if (j.contains("failed")) op.failed = Required<bool>(j, "failed", where);
    if (op.kind == OpKind::kRead && op.response && !op.failed) {
      if (!j.contains("ret")) {
        throw CheckerInputError(where + ": completed read without \"ret\"");
      }
      op.result = ParseValue(j["ret"], where);
    }
    h.operations.push_back(op);
  }
  return h;
}

}  // namespace mbreg
