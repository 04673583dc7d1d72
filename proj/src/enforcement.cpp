// Copyright 2026 The dspolicy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dspolicy/enforcement.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace dspolicy {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::pair<AuditOutcome, std::string_view> kOutcomes[] = {
    {AuditOutcome::Permitted, "Permitted"}, {AuditOutcome::Denied, "Denied"},
    {AuditOutcome::Delayed, "Delayed"},     {AuditOutcome::Executed, "Executed"},
    {AuditOutcome::DutyFulfilled, "DutyFulfilled"}, {AuditOutcome::DutyViolated, "DutyViolated"},
    {AuditOutcome::Revoked, "Revoked"},     {AuditOutcome::Notified, "Notified"},
};

bool belongs_to(const AuditRecord& r, const Policy& agreement) {
  return r.agreement.empty() || r.agreement == agreement.uid;
}

bool about_duty(const Rule& duty, const AuditRecord& r, const ProfileRegistry& registry) {
  if (r.outcome != AuditOutcome::Executed && r.outcome != AuditOutcome::Notified) return false;
  if (!registry.subsumes(duty.action.action, r.action)) return false;
  if (duty.target && *duty.target != r.target) return false;
  if (duty.assignee && *duty.assignee != r.actor) return false;
  return true;
}

bool reported_failure(const AuditRecord& r) {
  auto it = r.evidence.find("outcome");
  return it != r.evidence.end() && it->second == "fail";
}

bool is_temporal(const Constraint& c) {
  return c.left_operand == odrl("dateTime") || c.left_operand == odrl("event") ||
         c.left_operand == odrl("timeInterval");
}

AccessRequest evidence_request(const AuditRecord& r) {
  AccessRequest req;
  req.requester = r.actor;
  req.target = r.target;
  req.action = r.action;
  req.timestamp = r.at;
  for (const auto& [k, v] : r.evidence) {
    if (k == "outcome") continue;
    Iri key = expand_name(k);
    if (!key.is_absolute()) {
      // Bare local names resolve against the odrl namespace first, then dsp.
      Iri o = odrl(k), d = dsp(k);
      key = ProfileRegistry::builtin().resolve(o) ? o : d;
    }
    req.attributes[key] = plain_literal(v);
  }
  return req;
}

std::vector<std::pair<const Constraint*, bool>> duty_constraints(const Rule& duty) {
  std::vector<std::pair<const Constraint*, bool>> out;
  for (const auto& c : duty.action.refinements) out.push_back({&c, true});
  for (const auto& c : duty.constraints) out.push_back({&c, false});
  return out;
}

std::optional<std::pair<Timestamp, bool>> deadline_of(const Rule& duty) {
  std::optional<std::pair<Timestamp, bool>> best;
  for (const auto& c : duty.constraints) {
    if (c.left_operand != odrl("dateTime")) continue;
    auto op = c.kind();
    if (op != Operator::Lt && op != Operator::Lteq) continue;
    const auto* lit = std::get_if<TypedLiteral>(&c.right_operand);
    if (!lit) continue;
    auto t = parse_datetime(lit->lexical);
    if (t && (!best || *t < best->first)) best = std::make_pair(*t, op == Operator::Lteq);
  }
  return best;
}

const Constraint* periodic_interval(const Rule& duty) {
  if (duty.action.action != dsp("update")) return nullptr;
  for (const auto& c : duty.constraints) {
    if (c.left_operand == odrl("timeInterval")) return &c;
  }
  return nullptr;
}

ObligationStatus status_of(const Rule& duty, std::string path, const std::vector<const AuditRecord*>& records,
                           Timestamp start, Timestamp now, const DetectiveOptions& options) {
  ObligationStatus st;
  st.duty = duty;
  st.path = std::move(path);
  if (auto d = deadline_of(duty)) st.deadline = d->first;

  if (const Constraint* interval = periodic_interval(duty)) {
    const auto* lit = std::get_if<TypedLiteral>(&interval->right_operand);
    auto step = lit ? parse_duration(lit->lexical) : std::nullopt;
    if (!step) {
      st.status = DutyStatus::Violated;
      st.detail = "unreadable update interval";
      return st;
    }
    std::vector<Timestamp> events;
    for (const auto* r : records) {
      if (evidence_satisfies(duty, *r, options)) events.push_back(r->at);
    }
    std::sort(events.begin(), events.end());
    ObligationStatus gaps = check_up_to_dateness(events, *step, {options.window_start.value_or(start), now});
    st.detail = gaps.detail;
    if (gaps.status == DutyStatus::Violated) {
      st.status = DutyStatus::Violated;
    } else if (options.window_closed) {
      st.status = DutyStatus::Fulfilled;
      if (!events.empty()) st.fulfilled_at = events.back();
    }
    return st;
  }

  for (const auto* r : records) {
    if (r->at > now || !evidence_satisfies(duty, *r, options)) continue;
    if (!st.fulfilled_at || r->at < *st.fulfilled_at) st.fulfilled_at = r->at;
  }
  if (st.fulfilled_at) {
    st.status = DutyStatus::Fulfilled;
    st.detail = "evidence at " + format_datetime(*st.fulfilled_at);
    return st;
  }
  for (const auto* r : records) {
    if (r->at <= now && evidence_contradicts(duty, *r, options)) {
      st.status = DutyStatus::Violated;
      st.detail = "contradicting evidence seq " + std::to_string(r->seq);
      return st;
    }
  }
  if (auto d = deadline_of(duty)) {
    bool passed = d->second ? now > d->first : now >= d->first;
    if (passed) {
      st.status = DutyStatus::Violated;
      st.detail = "deadline " + format_datetime(d->first) + " passed without evidence";
      return st;
    }
  }
  st.detail = "awaiting evidence";
  return st;
}

bool rule_covers(const Rule& perm, const AuditRecord& r, const ProfileRegistry& registry) {
  if (perm.target && *perm.target != r.target) return false;
  if (perm.assignee && *perm.assignee != r.actor) return false;
  return registry.subsumes(perm.action.action, r.action);
}

const Rule* permission_for(const Policy& agreement, const OngoingUsage& u, const ProfileRegistry& registry) {
  for (const auto& rule : agreement.rules) {
    if (rule.kind != RuleKind::Permission || rule.action.action != u.key.action) continue;
    if (rule.assignee && *rule.assignee != u.key.assignee) continue;
    if (rule.target && *rule.target != u.request.target) continue;
    if (!registry.subsumes(rule.action.action, u.request.action)) continue;
    return &rule;
  }
  return nullptr;
}

bool consumptive(const Constraint& c) {
  return c.left_operand == odrl("count") || c.left_operand == odrl("timeInterval") ||
         c.left_operand == dsp("concurrentConnections");
}

std::optional<std::uint64_t> connection_bound(const Rule& perm) {
  for (const auto& c : perm.constraints) {
    if (c.left_operand != dsp("concurrentConnections")) continue;
    const auto* lit = std::get_if<TypedLiteral>(&c.right_operand);
    auto d = lit ? Decimal::parse(lit->lexical) : std::nullopt;
    if (!d || d->units() < 0) return 0;
    auto n = static_cast<std::uint64_t>(d->units() / Decimal::kScale);
    if (c.kind() == Operator::Lt) return n == 0 ? 0 : n - 1;
    return n;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(AuditOutcome outcome) {
  for (const auto& [o, name] : kOutcomes) {
    if (o == outcome) return name;
  }
  return "?";
}

std::optional<AuditOutcome> audit_outcome_from_string(std::string_view text) {
  for (const auto& [o, name] : kOutcomes) {
    if (name == text) return o;
  }
  return std::nullopt;
}

std::string_view to_string(DutyStatus status) {
  switch (status) {
    case DutyStatus::Pending: return "Pending";
    case DutyStatus::Fulfilled: return "Fulfilled";
    case DutyStatus::Violated: return "Violated";
  }
  return "?";
}

std::string_view to_string(EnforcementAction action) {
  switch (action) {
    case EnforcementAction::Allow: return "Allow";
    case EnforcementAction::Block: return "Block";
    case EnforcementAction::Delay: return "Delay";
  }
  return "?";
}

const AuditRecord& AuditLog::append(AuditRecord record) {
  record.seq = records_.empty() ? 1 : records_.back().seq + 1;
  records_.push_back(std::move(record));
  return records_.back();
}

std::string record_to_json(const AuditRecord& r) {
  ojson j{{"seq", r.seq},
          {"at", format_datetime(r.at)},
          {"actor", r.actor.value},
          {"action", r.action.value},
          {"target", r.target.value},
          {"outcome", std::string(to_string(r.outcome))},
          {"detail", r.detail}};
  if (!r.agreement.empty()) j["agreement"] = r.agreement.value;
  if (!r.evidence.empty()) j["evidence"] = r.evidence;
  return j.dump();
}

std::string AuditLog::to_ndjson() const {
  std::string out;
  for (const auto& r : records_) out += record_to_json(r) + "\n";
  return out;
}

AuditLog AuditLog::from_ndjson(std::string_view text) {
  AuditLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "audit log line " + std::to_string(lineno) + ": ";
    try {
      ojson j = ojson::parse(line);
      AuditRecord r;
      r.seq = j.at("seq").get<std::uint64_t>();
      auto at = parse_datetime(j.at("at").get<std::string>());
      if (!at) throw std::invalid_argument(where + "bad timestamp");
      r.at = *at;
      r.actor = Iri(j.at("actor").get<std::string>());
      r.action = expand_name(j.at("action").get<std::string>());
      r.target = Iri(j.at("target").get<std::string>());
      auto outcome = audit_outcome_from_string(j.at("outcome").get<std::string>());
      if (!outcome) throw std::invalid_argument(where + "unknown outcome");
      r.outcome = *outcome;
      r.detail = j.value("detail", std::string());
      r.agreement = Iri(j.value("agreement", std::string()));
      if (j.contains("evidence")) r.evidence = j.at("evidence").get<std::map<std::string, std::string>>();
      if (!log.records_.empty() && r.seq <= log.records_.back().seq) {
        throw std::invalid_argument(where + "seq not increasing");
      }
      log.records_.push_back(std::move(r));
    } catch (const ojson::exception& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  return log;
}

const AuditRecord& record_evidence(AuditLog& log, const Iri& actor, const Iri& action, const Iri& target, Timestamp at,
                                   std::map<std::string, std::string> evidence, const Iri& agreement) {
  AuditRecord r;
  r.at = at;
  r.actor = actor;
  r.action = action;
  r.target = target;
  r.outcome = AuditOutcome::Executed;
  r.agreement = agreement;
  r.evidence = std::move(evidence);
  r.detail = "reported";
  if (!log.records().empty() && at < log.records().back().at) r.detail += "; out-of-order";
  return log.append(std::move(r));
}

bool evidence_satisfies(const Rule& duty, const AuditRecord& record, const DetectiveOptions& options) {
  if (!about_duty(duty, record, *options.registry) || reported_failure(record)) return false;
  AccessRequest req = evidence_request(record);
  UsageState empty;
  ProviderList none;
  EvaluationContext ctx{empty, req, none, options.regions, options.registry, {}};
  for (const auto& [c, refinement] : duty_constraints(duty)) {
    if (c->left_operand == odrl("event") || c->left_operand == odrl("timeInterval")) continue;
    if (!evaluate_constraint(*c, ctx).satisfied()) return false;
  }
  return true;
}

bool evidence_contradicts(const Rule& duty, const AuditRecord& record, const DetectiveOptions& options) {
  if (!about_duty(duty, record, *options.registry)) return false;
  if (reported_failure(record)) return true;
  AccessRequest req = evidence_request(record);
  UsageState empty;
  ProviderList none;
  EvaluationContext ctx{empty, req, none, options.regions, options.registry, {}};
  for (const auto& [c, refinement] : duty_constraints(duty)) {
    if (is_temporal(*c) || !req.attributes.count(c->left_operand)) continue;
    if (evaluate_constraint(*c, ctx).status == VerdictStatus::Unsatisfied) return true;
  }
  return false;
}

std::string obligation_to_json(const ObligationStatus& s) {
  ojson j{{"path", s.path}, {"action", s.duty.action.action.value}};
  if (s.duty.target) j["target"] = s.duty.target->value;
  if (s.duty.assignee) j["obligated"] = s.duty.assignee->value;
  j["status"] = std::string(to_string(s.status));
  if (s.deadline) j["deadline"] = format_datetime(*s.deadline);
  if (s.fulfilled_at) j["fulfilled_at"] = format_datetime(*s.fulfilled_at);
  j["detail"] = s.detail;
  return j.dump();
}

PepResult pep_handle(const AccessRequest& req, const Policy& agreement, const UsageState& state,
                     const ProviderList& pip, AuditLog& log, const PepOptions& options) {
  PepResult res;
  res.state = state;
  AuditRecord base;
  base.at = req.timestamp;
  base.actor = req.requester;
  base.action = req.action;
  base.target = req.target;
  base.agreement = agreement.uid;

  if (options.revoked) {
    AuditRecord r = base;
    r.outcome = AuditOutcome::Revoked;
    r.detail = "agreement revoked";
    log.append(std::move(r));
    res.outcome = AuditOutcome::Revoked;
    return res;
  }

  res.decision = evaluate_request(agreement, req, state, pip, {options.regions, options.registry});
  const Decision& d = res.decision;
  if (d.outcome != Outcome::Permit) {
    AuditRecord r = base;
    r.outcome = AuditOutcome::Denied;
    r.detail = std::string(to_string(d.outcome)) + (d.reason.empty() ? "" : ": " + d.reason);
    log.append(std::move(r));
    return res;
  }

  DetectiveOptions evidence_opts;
  evidence_opts.registry = options.registry;
  evidence_opts.regions = options.regions;
  for (const auto& duty : d.preconditions) {
    bool done = std::any_of(log.records().begin(), log.records().end(), [&](const AuditRecord& r) {
      return belongs_to(r, agreement) && r.at <= req.timestamp && evidence_satisfies(duty, r, evidence_opts);
    });
    if (!done) res.waiting_on.push_back(duty);
  }
  if (!res.waiting_on.empty()) {
    AuditRecord r = base;
    r.outcome = AuditOutcome::Delayed;
    r.detail = "waiting on";
    for (const auto& duty : res.waiting_on) r.detail += " " + compact(duty.action.action);
    log.append(std::move(r));
    res.action = EnforcementAction::Delay;
    res.outcome = AuditOutcome::Delayed;
    return res;
  }

  res.state = commit_usage(d, req, state);
  res.action = EnforcementAction::Allow;
  res.outcome = AuditOutcome::Permitted;
  AuditRecord permitted = base;
  permitted.outcome = AuditOutcome::Permitted;
  permitted.detail = "permit";
  log.append(std::move(permitted));
  AuditRecord executed = base;
  executed.outcome = AuditOutcome::Executed;
  executed.detail = "usage executed x" + std::to_string(req.units_requested);
  log.append(std::move(executed));
  if (d.charge) {
    AuditRecord paid = base;
    paid.action = odrl("compensate");
    paid.outcome = AuditOutcome::Executed;
    paid.detail = "charged " + d.charge->amount.to_string();
    paid.evidence = {{"odrl:payAmount", d.charge->amount.to_string()}};
    log.append(std::move(paid));
  }
  for (size_t i = 0; i < d.activated_duties.size(); ++i) {
    const Rule& duty = d.activated_duties[i];
    if (duty.action.action == odrl("compensate") && d.charge) continue;
    ObligationStatus st;
    st.duty = duty;
    st.path = "duty[" + std::to_string(i) + "]";
    if (auto dl = deadline_of(duty)) st.deadline = dl->first;
    st.detail = "registered";
    res.pending.push_back(std::move(st));
  }
  return res;
}

std::vector<ObligationStatus> detective_check(const Policy& agreement, const AuditLog& log, Timestamp now,
                                              const DetectiveOptions& options) {
  std::vector<const AuditRecord*> records;
  for (const auto& r : log.records()) {
    if (belongs_to(r, agreement)) records.push_back(&r);
  }
  Timestamp first = records.empty() ? now : records.front()->at;
  for (const auto* r : records) first = std::min(first, r->at);

  std::vector<ObligationStatus> out;
  for (size_t i = 0; i < agreement.rules.size(); ++i) {
    const Rule& rule = agreement.rules[i];
    std::string path = "rule[" + std::to_string(i) + "]";
    if (rule.kind == RuleKind::Duty) {
      out.push_back(status_of(rule, path, records, first, now, options));
      continue;
    }
    if (rule.kind != RuleKind::Permission || rule.duties.empty()) continue;
    std::optional<Timestamp> activated;
    for (const auto* r : records) {
      if (r->outcome == AuditOutcome::Permitted && r->at <= now && rule_covers(rule, *r, *options.registry)) {
        if (!activated || r->at < *activated) activated = r->at;
      }
    }
    if (!activated) continue;
    auto duties = effective_duties(rule);
    for (size_t j = 0; j < duties.size(); ++j) {
      out.push_back(status_of(duties[j], path + ".duty[" + std::to_string(j) + "]", records, *activated, now, options));
    }
  }
  return out;
}

ObligationStatus check_up_to_dateness(const std::vector<Timestamp>& update_events, Seconds interval, Window window) {
  ObligationStatus st;
  std::vector<Timestamp> events;
  for (auto t : update_events) {
    if (t >= window.start && t <= window.end) events.push_back(t);
  }
  std::sort(events.begin(), events.end());
  if (events.empty()) {
    st.status = DutyStatus::Violated;
    st.detail = "no update events in window";
    return st;
  }
  std::vector<Timestamp> points{window.start};
  points.insert(points.end(), events.begin(), events.end());
  points.push_back(window.end);
  for (size_t i = 1; i < points.size(); ++i) {
    Seconds gap = points[i] - points[i - 1];
    if (gap > interval) {
      st.status = DutyStatus::Violated;
      st.detail = "gap of " + format_duration(gap) + " from " + format_datetime(points[i - 1]) + " to " +
                  format_datetime(points[i]) + " exceeds " + format_duration(interval);
      return st;
    }
  }
  st.status = DutyStatus::Fulfilled;
  st.fulfilled_at = events.back();
  st.detail = std::to_string(events.size()) + " updates, no gap over " + format_duration(interval);
  return st;
}

std::vector<RevocationEvent> continuous_monitor_step(std::vector<OngoingUsage>& usages, const Policy& agreement,
                                                     const UsageState& state, const ProviderList& pip, Timestamp now,
                                                     AuditLog& log, const MonitorOptions& options) {
  std::vector<RevocationEvent> events;
  std::vector<bool> revoke(usages.size(), false);
  std::vector<std::string> reasons(usages.size());

  for (size_t i = 0; i < usages.size(); ++i) {
    const OngoingUsage& u = usages[i];
    const Rule* perm = permission_for(agreement, u, *options.registry);
    if (!perm) {
      revoke[i] = true;
      reasons[i] = "no matching permission";
      continue;
    }
    AccessRequest req = u.request;
    req.timestamp = now;
    EvaluationContext ctx{state, req, pip, options.regions, options.registry, u.key};
    for (const auto& c : perm->constraints) {
      if (consumptive(c)) continue;
      ConstraintVerdict v = evaluate_constraint(c, ctx);
      if (!v.satisfied()) {
        revoke[i] = true;
        reasons[i] = compact(c.left_operand) + " " + std::string(to_string(v.status)) + ": " + v.reason;
        break;
      }
    }
  }

  std::map<UsageKey, std::vector<size_t>> by_key;
  for (size_t i = 0; i < usages.size(); ++i) {
    if (!revoke[i] && usages[i].connection) by_key[usages[i].key].push_back(i);
  }
  for (auto& [key, idx] : by_key) {
    const Rule* perm = permission_for(agreement, usages[idx.front()], *options.registry);
    auto bound = perm ? connection_bound(*perm) : std::nullopt;
    if (!bound || idx.size() <= *bound) continue;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      if (usages[a].started != usages[b].started) return usages[a].started > usages[b].started;
      return usages[a].id > usages[b].id;
    });
    for (size_t k = 0; k < idx.size() - *bound; ++k) {
      revoke[idx[k]] = true;
      reasons[idx[k]] = "concurrent connections " + std::to_string(idx.size()) + " exceed " + std::to_string(*bound);
    }
  }

  std::vector<OngoingUsage> kept;
  for (size_t i = 0; i < usages.size(); ++i) {
    OngoingUsage& u = usages[i];
    if (revoke[i]) {
      events.push_back({u.id, u.request.requester, u.request.target, now, reasons[i]});
      AuditRecord r;
      r.at = now;
      r.actor = u.request.requester;
      r.action = u.request.action;
      r.target = u.request.target;
      r.outcome = AuditOutcome::Revoked;
      r.agreement = agreement.uid;
      r.detail = "usage " + std::to_string(u.id) + " revoked: " + reasons[i];
      log.append(std::move(r));
      continue;
    }
    if (!u.notified) {
      const Rule* perm = permission_for(agreement, u, *options.registry);
      for (const auto& duty : effective_duties(*perm)) {
        if (duty.action.action != odrl("inform")) continue;
        AuditRecord r;
        r.at = now;
        r.actor = u.request.requester;
        r.action = odrl("inform");
        r.target = u.request.target;
        r.outcome = AuditOutcome::Notified;
        r.agreement = agreement.uid;
        r.detail = "usage " + std::to_string(u.id) + " reported to " + (duty.assigner ? duty.assigner->value : "");
        log.append(std::move(r));
        u.notified = true;
        break;
      }
    }
    kept.push_back(u);
  }
  usages = std::move(kept);
  return events;
}

}  // namespace dspolicy
