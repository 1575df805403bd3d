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

#include "mbreg/sim.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "mbreg/errors.hpp"

namespace mbreg {
namespace {

using nlohmann::ordered_json;

constexpr std::size_t kObservedPoolSize = 32;

ordered_json ValueJson(Value v) {
  return v.is_bottom() ? ordered_json(nullptr) : ordered_json(v.raw());
}

ordered_json ServerList(const std::set<ServerId>& set) {
  ordered_json out = ordered_json::array();
  for (ServerId s : set) out.push_back(ToString(s));
  return out;
}

std::string DestinationName(const Destination& d) {
  return d.kind == Destination::Kind::kAllServers ? "servers"
                                                  : ToString(d.client);
}

std::string_view SourceName(ComputeSource source) {
  switch (source) {
    case ComputeSource::kUnchanged:
      return "unchanged";
    case ComputeSource::kWrite:
      return "write";
    case ComputeSource::kEcho:
      return "echo";
  }
  return "unknown";
}

class Engine {
 public:
  explicit Engine(const SimOptions& options)
      : opt_(options),
        model_(options.config.params.model),
        n_(options.config.n),
        f_(options.config.f),
        m_(options.clients),
        rng_(options.seed) {
    result_.admissible = options.config.admissible();
    result_.threshold = UncheckedThreshold(n_, f_, options.config.params);
    s_ = result_.threshold;
    for (int i = 1; i <= n_; ++i) servers_.push_back(MakeServer(ServerId{i}));
    for (int c = 1; c <= m_; ++c) clients_.push_back(MakeClient(ClientId{c}));
    open_op_.assign(m_ + 1, -1);
    crashed_.assign(m_ + 1, false);
    for (const auto& d : options.workload.directives) {
      directives_[d.round].push_back(d);
    }
    for (auto& [round, list] : directives_) {
      std::stable_sort(list.begin(), list.end(),
                       [](const Directive& a, const Directive& b) {
                         return a.client < b.client;
                       });
    }
  }

  SimResult Run() {
    Probe(0, {});
    Inject(0);
    for (Round r = 1; r <= opt_.rounds; ++r) RunRound(r);
    result_.final_servers = servers_;
    return std::move(result_);
  }

 private:
  void Emit(Round round, TracePhase phase, TraceKind kind, std::string actor,
            const ordered_json& payload) {
    if (!opt_.trace) return;
    opt_.trace->Emit({round, phase, kind, std::move(actor), payload.dump()});
  }

  void Violate(Round round, TracePhase phase, std::string kind,
               std::string detail) {
    ordered_json p;
    p["kind"] = kind;
    p["detail"] = detail;
    Emit(round, phase, TraceKind::kViolation, "engine", p);
    result_.probes.violations.push_back(
        {round, std::move(kind), std::move(detail)});
  }

  void Observe(Value v) {
    if (std::find(observed_.begin(), observed_.end(), v) != observed_.end()) {
      return;
    }
    observed_.push_back(v);
    if (observed_.size() > kObservedPoolSize) observed_.erase(observed_.begin());
  }

  AdversaryContext Context(Round r) const {
    return {r, n_, m_, round_lie_, observed_};
  }

  ServerState& Server(ServerId s) { return servers_[s.index - 1]; }

  void RunRound(Round r) {
    // ---- setup: agent placement, residual corruption, oracle
    Rng sched_rng = rng_.Stream("schedule", r, 0);
    RoundOccupancy occ = AdvanceSchedule(model_, opt_.strategy, sched_rng, n_,
                                         f_, r, prev_post_);
    if (static_cast<int>(occ.pre_send.size()) > f_ ||
        static_cast<int>(occ.PostSend().size()) > f_) {
      Violate(r, TracePhase::kSetup, "faulty_bound",
              "more than f servers occupied");
    }
    result_.schedule.RecordUnrestored(r, unrestored_);
    result_.schedule.Record(r, occ);
    Rng lie_rng = rng_.Stream("collude", r, 0);
    round_lie_ = ColludingLie(opt_.strategy, lie_rng, observed_);

    std::vector<FaultStatus> status(n_);
    std::set<ServerId> cured;
    for (int i = 1; i <= n_; ++i) {
      status[i - 1] = StatusAtSend(model_, ServerId{i}, r, result_.schedule);
      if (status[i - 1] == FaultStatus::kCured) cured.insert(ServerId{i});
    }
    {
      ordered_json p;
      p["occupied"] = ServerList(occ.pre_send);
      ordered_json moves = ordered_json::array();
      for (const auto& mv : occ.moves) {
        moves.push_back({ToString(mv.from), ToString(mv.to)});
      }
      p["moves"] = moves;
      p["cured"] = ServerList(cured);
      p["lie"] = ValueJson(round_lie_);
      Emit(r, TracePhase::kSetup, TraceKind::kFaultMove, "adversary", p);
    }

    if (model_ != ModelId::kBuhrman) {
      for (ServerId s : result_.schedule.FaultyAtSend(r - 1)) {
        if (occ.pre_send.count(s)) continue;
        Corrupt(r, TracePhase::kSetup, s);
      }
    }
    for (int i = 1; i <= n_; ++i) {
      const bool report = opt_.config.params.oracle_enabled &&
                          status[i - 1] == FaultStatus::kCured;
      servers_[i - 1] = ServerBeginRound(servers_[i - 1], report);
    }

    RoundProbe probe;
    probe.round = r;
    probe.cured = static_cast<int>(cured.size());

    // ---- send
    std::vector<Envelope> accepted;
    for (int i = 1; i <= n_; ++i) {
      const ServerId self{i};
      ServerState& state = servers_[i - 1];
      if (state.cured) {
        probe.dropped_reads += static_cast<int>(state.current_reads.size());
      }
      const Value pre_send_value = state.value;
      auto [next, out] = ServerSend(state, r);
      const auto honest = Expand(ProcessId::Of(self), out.outgoing, n_);
      const Behavior behavior =
          EffectiveBehavior(model_, self, r, result_.schedule);
      std::vector<Envelope> sent;
      bool passthrough = behavior == Behavior::kHonest ||
                         behavior == Behavior::kCuredSilentCapable;
      if (passthrough) {
        sent = honest;
      } else {
        Rng brng = rng_.Stream("byzantine", r, i);
        auto corrupted =
            CorruptOutgoing(behavior, opt_.strategy, brng, self,
                            GroupByRecipient(honest), pre_send_value, Context(r));
        for (const auto& [to, msgs] : corrupted) {
          for (const auto& msg : msgs) sent.push_back({ProcessId::Of(self), to, msg});
        }
      }
      state = std::move(next);

      if (model_ == ModelId::kBuhrman && status[i - 1] != FaultStatus::kFaulty &&
          !passthrough) {
        Violate(r, TracePhase::kSend, "m4_honest_send",
                ToString(self) + " was free at the start of the send phase");
      }

      ordered_json p;
      p["behavior"] = std::string(ToString(behavior));
      ordered_json msgs = ordered_json::array();
      if (passthrough) {
        for (const auto& o : out.outgoing) {
          msgs.push_back({DestinationName(o.to), ToString(o.msg)});
        }
      } else {
        for (const auto& e : sent) {
          msgs.push_back({ToString(e.to), ToString(e.msg)});
        }
      }
      p["messages"] = msgs;
      int rejected = 0;
      for (auto& e : sent) {
        if (ClaimedSender(e.msg) != e.from) {
          ++rejected;
          continue;
        }
        accepted.push_back(std::move(e));
      }
      p["rejected"] = rejected;
      probe.rejected += rejected;
      if (!msgs.empty() || rejected > 0) {
        Emit(r, TracePhase::kSend, TraceKind::kSend, ToString(self), p);
      }
    }
    for (int c = 1; c <= m_; ++c) {
      if (crashed_[c]) continue;
      auto [next, out] = ClientSend(clients_[c - 1], r);
      clients_[c - 1] = std::move(next);
      if (out.outgoing.empty()) continue;
      const ProcessId self = ProcessId::Of(ClientId{c});
      ordered_json msgs = ordered_json::array();
      for (const auto& o : out.outgoing) {
        msgs.push_back({DestinationName(o.to), ToString(o.msg)});
      }
      ordered_json p;
      p["messages"] = msgs;
      Emit(r, TracePhase::kSend, TraceKind::kSend, ToString(self), p);
      for (auto& e : Expand(self, out.outgoing, n_)) accepted.push_back(std::move(e));
    }

    // Agents travel after their old host's send; the host keeps what they
    // leave behind.
    const std::set<ServerId> post = occ.PostSend();
    if (model_ == ModelId::kBuhrman) {
      for (ServerId s : occ.Vacated()) {
        Corrupt(r, TracePhase::kSend, s);
        unrestored_.insert(s);
      }
      for (ServerId s : post) unrestored_.erase(s);
    }

    // ---- receive
    std::vector<std::vector<Inbound>> server_inbox(n_ + 1), client_inbox(m_ + 1);
    std::size_t delivered = 0;
    for (const auto& e : accepted) {
      if (e.to.is_server()) {
        if (e.to.index < 1 || e.to.index > n_) continue;
        server_inbox[e.to.index].push_back({e.from, e.msg});
      } else {
        if (e.to.index < 1 || e.to.index > m_) continue;
        if (crashed_[e.to.index]) {
          ++delivered;  // lost with the crashed client
          continue;
        }
        client_inbox[e.to.index].push_back({e.from, e.msg});
      }
      ++delivered;
    }
    if (delivered != accepted.size()) {
      Violate(r, TracePhase::kReceive, "reliable_delivery",
              std::to_string(accepted.size() - delivered) +
                  " accepted messages had no recipient");
    }

    std::vector<ServerState> before_receive = servers_;
    for (int i = 1; i <= n_; ++i) {
      const auto& inbox = server_inbox[i];
      servers_[i - 1] = ServerReceive(servers_[i - 1], inbox);
      EmitDeliveries(r, ProcessId::Of(ServerId{i}), inbox);
      if (post.count(ServerId{i})) {
        for (const auto& in : inbox) {
          if (const auto* w = std::get_if<WriteMsg>(&in.msg)) Observe(w->value);
          if (const auto* e = std::get_if<EchoMsg>(&in.msg)) Observe(e->value);
        }
      }
    }
    std::vector<ClientState> clients_before = clients_;
    for (int c = 1; c <= m_; ++c) {
      if (crashed_[c]) continue;
      clients_[c - 1] = ClientReceive(clients_[c - 1], r, client_inbox[c]);
      EmitDeliveries(r, ProcessId::Of(ClientId{c}), client_inbox[c]);
    }

    // ---- compute
    for (int i = 1; i <= n_; ++i) {
      const ServerId self{i};
      const Value old_value = servers_[i - 1].value;
      ServerComputeResult res = ServerComputeDetailed(servers_[i - 1], s_);
      if (opt_.verify_inbox_permutation) {
        std::vector<Inbound> shuffled = server_inbox[i];
        Rng prng = rng_.Stream("permute", r, i);
        std::shuffle(shuffled.begin(), shuffled.end(), prng);
        ServerState alt = ServerCompute(
            ServerReceive(before_receive[i - 1], shuffled), s_);
        if (!(alt == res.state)) {
          Violate(r, TracePhase::kCompute, "inbox_permutation",
                  ToString(self) + " depends on inbox order");
        }
      }
      if (res.echo_tie) ++result_.probes.echo_ties;
      if (model_ == ModelId::kBuhrman && unrestored_.count(self) &&
          !post.count(self) && res.source != ComputeSource::kUnchanged) {
        unrestored_.erase(self);
      }
      servers_[i - 1] = std::move(res.state);
      if (post.count(self)) Observe(servers_[i - 1].value);
      if (old_value != servers_[i - 1].value || res.echo_tie) {
        ordered_json p;
        p["from"] = ValueJson(old_value);
        p["to"] = ValueJson(servers_[i - 1].value);
        p["source"] = std::string(SourceName(res.source));
        if (res.echo_tie) p["echo_tie"] = true;
        Emit(r, TracePhase::kCompute, TraceKind::kStateTransition,
             ToString(self), p);
      }
    }

    for (int c = 1; c <= m_; ++c) {
      if (crashed_[c]) continue;
      auto [next, response] = ClientCompute(clients_[c - 1], r, s_);
      if (opt_.verify_inbox_permutation) {
        std::vector<Inbound> shuffled = client_inbox[c];
        Rng prng = rng_.Stream("permute", r, n_ + c);
        std::shuffle(shuffled.begin(), shuffled.end(), prng);
        auto alt = ClientCompute(
            ClientReceive(clients_before[c - 1], r, shuffled), r, s_);
        if (!(alt.first == next) || alt.second != response) {
          Violate(r, TracePhase::kCompute, "inbox_permutation",
                  ToString(ClientId{c}) + " depends on inbox order");
        }
      }
      clients_[c - 1] = std::move(next);
      if (response) Respond(r, ClientId{c}, *response);
    }

    Probe(r, post);
    Inject(r);
    prev_post_ = post;
    result_.probes.rounds.back().dropped_reads = probe.dropped_reads;
    result_.probes.rounds.back().rejected = probe.rejected;
    result_.probes.rounds.back().cured = probe.cured;
  }

  void Corrupt(Round r, TracePhase phase, ServerId s) {
    Rng crng = rng_.Stream("corrupt", r, s.index);
    const Value before = Server(s).value;
    Server(s) = CorruptState(opt_.strategy, crng, Server(s), Context(r));
    ordered_json p;
    p["from"] = ValueJson(before);
    p["to"] = ValueJson(Server(s).value);
    p["source"] = "agent";
    Emit(r, phase, TraceKind::kStateTransition, ToString(s), p);
  }

  void EmitDeliveries(Round r, ProcessId to, const std::vector<Inbound>& inbox) {
    if (!opt_.trace || inbox.empty()) return;
    ordered_json from = ordered_json::array();
    for (const auto& in : inbox) {
      from.push_back({ToString(in.sender), ToString(in.msg)});
    }
    ordered_json p;
    p["messages"] = from;
    Emit(r, TracePhase::kReceive, TraceKind::kDeliver, ToString(to), p);
  }

  void Respond(Round r, ClientId client, const Response& response) {
    const int idx = open_op_[client.index];
    if (idx < 0) return;
    Operation& op = result_.history.operations[idx];
    op.response = r;
    ordered_json p;
    p["op_id"] = op.id;
    p["kind"] = std::string(ToString(op.kind));
    if (const auto* ret = std::get_if<ReadReturn>(&response)) {
      op.result = ret->value;
      p["ret"] = ValueJson(ret->value);
    } else if (const auto* fail = std::get_if<ReadFailure>(&response)) {
      op.failed = true;
      p["failed"] = true;
      ReadFailureEvent ev{r, client, op.id, *fail, n_};
      result_.probes.read_failures.push_back(ev);
      ordered_json tally = ordered_json::array();
      for (const auto& [v, count] : fail->Tally()) {
        tally.push_back({ValueJson(v), count});
      }
      p["tally"] = tally;
      p["silent"] = ev.silent();
    }
    Emit(r, TracePhase::kCompute, TraceKind::kOpResponse, ToString(client), p);
    if (op.failed) {
      Violate(r, TracePhase::kCompute, "protocol_failure",
              "read op" + std::to_string(op.id) + " of " + ToString(client) +
                  " found " + std::to_string(std::get<ReadFailure>(response)
                                                 .qualifying.size()) +
                  " values with " + std::to_string(s_) + " replies");
    }
    open_op_[client.index] = -1;
  }

  // Applies the directives whose first send is in round r + 1.
  void Inject(Round r) {
    auto it = directives_.find(r + 1);
    if (it == directives_.end()) return;
    for (const auto& d : it->second) {
      const int c = d.client.index;
      if (crashed_[c]) continue;
      ordered_json p;
      if (d.kind == Directive::Kind::kCrash) {
        crashed_[c] = true;
        result_.history.crashes[d.client] = d.round;
        p["kind"] = "crash";
        Emit(r, TracePhase::kCompute, TraceKind::kOpInvoke, ToString(d.client),
             p);
        continue;
      }
      Operation op;
      op.id = static_cast<int>(result_.history.operations.size()) + 1;
      op.client = d.client;
      op.invoke = d.round;
      if (d.kind == Directive::Kind::kWrite) {
        op.kind = OpKind::kWrite;
        op.argument = d.value;
        clients_[c - 1] = ClientInvokeWrite(clients_[c - 1], d.value);
      } else {
        op.kind = OpKind::kRead;
        clients_[c - 1] = ClientInvokeRead(clients_[c - 1]);
      }
      open_op_[c] = static_cast<int>(result_.history.operations.size());
      result_.history.operations.push_back(op);
      p["op_id"] = op.id;
      p["kind"] = std::string(ToString(op.kind));
      if (op.kind == OpKind::kWrite) p["arg"] = ValueJson(op.argument);
      p["first_send_round"] = op.invoke;
      Emit(r, TracePhase::kCompute, TraceKind::kOpInvoke, ToString(d.client),
           p);
    }
  }

  void Probe(Round r, const std::set<ServerId>& faulty) {
    std::vector<FaultStatus> statuses(n_, FaultStatus::kCorrect);
    for (ServerId s : faulty) statuses[s.index - 1] = FaultStatus::kFaulty;
    const Agreement a = ProbeAgreement(servers_, statuses);
    RoundProbe probe;
    probe.round = r;
    probe.modal = a.modal;
    probe.support = a.support;
    probe.faulty = static_cast<int>(faulty.size());
    probe.non_faulty = n_ - probe.faulty;
    result_.probes.rounds.push_back(probe);
    ordered_json p;
    p["modal"] = ValueJson(a.modal);
    p["support"] = a.support;
    p["non_faulty"] = probe.non_faulty;
    p["required"] = n_ - f_;
    Emit(r, TracePhase::kCompute, TraceKind::kProbe, "probe", p);
    if (a.support < n_ - f_) {
      Violate(r, TracePhase::kCompute, "agreement",
              std::to_string(a.support) + " non-faulty servers hold " +
                  ToString(a.modal) + ", need " + std::to_string(n_ - f_));
    }
  }

  const SimOptions& opt_;
  ModelId model_;
  int n_;
  int f_;
  int m_;
  int s_ = 0;
  Rng rng_;
  SimResult result_;
  std::vector<ServerState> servers_;
  std::vector<ClientState> clients_;
  std::vector<int> open_op_;
  std::vector<bool> crashed_;
  std::map<Round, std::vector<Directive>> directives_;
  std::set<ServerId> prev_post_;
  std::set<ServerId> unrestored_;
  std::vector<Value> observed_;
  Value round_lie_;
};

}  // namespace

int ProbeReport::MinSupport() const {
  int min = -1;
  for (const auto& p : rounds) {
    if (min < 0 || p.support < min) min = p.support;
  }
  return std::max(min, 0);
}

int ProbeReport::CountViolations(std::string_view kind) const {
  return static_cast<int>(std::count_if(
      violations.begin(), violations.end(),
      [kind](const Violation& v) { return v.kind == kind; }));
}

Agreement ProbeAgreement(std::span<const ServerState> servers,
                         std::span<const FaultStatus> statuses) {
  std::map<Value, int> count;
  for (std::size_t i = 0; i < servers.size(); ++i) {
    if (i < statuses.size() && statuses[i] == FaultStatus::kFaulty) continue;
    ++count[servers[i].value];
  }
  Agreement a;
  for (const auto& [v, c] : count) {
    if (c > a.support) a = {v, c};
  }
  return a;
}

void ValidateSimOptions(const SimOptions& options) {
  options.config.Validate();
  if (options.clients < 0) throw ConfigError("clients must be >= 0");
  if (options.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (!options.config.admissible() && !options.allow_inadmissible) {
    options.config.threshold();  // throws with the admissibility message
  }
  ValidateStrategy(options.strategy, options.config.params.model,
                   options.config.n, options.config.f);
  ValidateWorkload(options.workload, options.clients, options.rounds);
  if (options.strategy.kind == Strategy::Kind::kScripted) {
    // Movement errors only show up once placements are chained.
    const Rng rng(options.seed);
    std::set<ServerId> prev;
    for (Round r = 1; r <= options.rounds; ++r) {
      Rng sched = rng.Stream("schedule", r, 0);
      prev = AdvanceSchedule(options.config.params.model, options.strategy, sched,
                             options.config.n, options.config.f, r, prev)
                 .PostSend();
    }
  }
}

SimResult Run(const SimOptions& options) {
  ValidateSimOptions(options);
  return Engine(options).Run();
}

std::string ProbeReportToJson(const ProbeReport& report, const SimResult& sim,
                              const SimOptions& options) {
  ordered_json j;
  j["model"] = std::string(ModelName(options.config.params.model));
  j["n"] = options.config.n;
  j["f"] = options.config.f;
  j["threshold"] = sim.threshold;
  j["admissible"] = sim.admissible;
  j["rounds"] = options.rounds;
  j["seed"] = options.seed;
  j["clients"] = options.clients;
  j["adversary"] = std::string(StrategyName(options.strategy.kind));
  j["required_support"] = options.config.n - options.config.f;
  j["min_support"] = report.MinSupport();
  j["echo_ties"] = report.echo_ties;
  ordered_json violations = ordered_json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"round", v.round}, {"kind", v.kind}, {"detail", v.detail}});
  }
  j["violations"] = violations;
  ordered_json failures = ordered_json::array();
  for (const auto& ev : report.read_failures) {
    ordered_json tally = ordered_json::array();
    for (const auto& [v, c] : ev.failure.Tally()) {
      tally.push_back({{"value", ValueJson(v)}, {"count", c}});
    }
    failures.push_back({{"round", ev.round},
                        {"client", ev.client.index},
                        {"op_id", ev.op_id},
                        {"threshold", ev.failure.threshold},
                        {"tally", tally},
                        {"silent", ev.silent()}});
  }
  j["read_failures"] = failures;
  ordered_json rounds = ordered_json::array();
  for (const auto& p : report.rounds) {
    rounds.push_back({{"round", p.round},
                      {"modal", ValueJson(p.modal)},
                      {"support", p.support},
                      {"non_faulty", p.non_faulty},
                      {"faulty", p.faulty},
                      {"cured", p.cured},
                      {"dropped_reads", p.dropped_reads},
                      {"rejected", p.rejected}});
  }
  j["per_round"] = rounds;
  return j.dump(2);
}

}  // namespace mbreg
