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

#include "dspolicy/pdp.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace dspolicy {

using nlohmann::json;

namespace {

enum class Category { Numeric, DateTime, Duration, Text };

Category category_of(const Iri& dt) {
  for (std::string_view n : {"decimal", "integer", "nonNegativeInteger", "positiveInteger", "int", "long",
                             "double", "float"}) {
    if (dt == xsd(n)) return Category::Numeric;
  }
  if (dt == xsd("dateTime")) return Category::DateTime;
  if (dt == xsd("duration")) return Category::Duration;
  return Category::Text;
}

ConstraintVerdict sat(std::string reason = {}) { return {VerdictStatus::Satisfied, std::move(reason)}; }
ConstraintVerdict unsat(std::string reason) { return {VerdictStatus::Unsatisfied, std::move(reason)}; }
ConstraintVerdict undetermined(std::string reason) { return {VerdictStatus::Undetermined, std::move(reason)}; }

ConstraintVerdict from_bool(bool ok, const std::string& lhs, Operator op, const std::string& rhs) {
  std::string text = lhs + " " + std::string(to_string(op)) + " " + rhs;
  return ok ? sat(text) : unsat("not " + text);
}

template <typename T>
std::optional<bool> order(const T& a, Operator op, const T& b) {
  switch (op) {
    case Operator::Eq: return a == b;
    case Operator::Neq: return a != b;
    case Operator::Lt: return a < b;
    case Operator::Lteq: return a <= b;
    case Operator::Gt: return a > b;
    case Operator::Gteq: return a >= b;
    default: return std::nullopt;
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string term_text(const Term& t) {
  if (const auto* iri = std::get_if<Iri>(&t)) return iri->value;
  return std::get<TypedLiteral>(t).lexical;
}

ConstraintVerdict compare(const TypedLiteral& lhs, Operator op, const Term& rhs, const Iri& expected,
                          const RegionHierarchy* regions) {
  const std::string rtext = term_text(rhs);
  if (op == Operator::IsAnyOf) {
    for (const auto& option : split_list(rtext)) {
      if (expand_name(option).value == expand_name(lhs.lexical).value) return sat(lhs.lexical + " isAnyOf " + rtext);
    }
    return unsat(lhs.lexical + " not in " + rtext);
  }
  if (op == Operator::IsPartOf) {
    if (!regions) return undetermined("no region hierarchy");
    bool ok = region_contains(rtext, lhs.lexical, *regions);
    return ok ? sat(lhs.lexical + " isPartOf " + rtext) : unsat(lhs.lexical + " is not part of " + rtext);
  }
  if (std::holds_alternative<Iri>(rhs)) {
    if (op != Operator::Eq && op != Operator::Neq) return unsat("type mismatch");
    bool eq = expand_name(lhs.lexical) == std::get<Iri>(rhs);
    return from_bool(op == Operator::Eq ? eq : !eq, lhs.lexical, op, rtext);
  }
  switch (category_of(expected)) {
    case Category::Numeric: {
      auto a = Decimal::parse(lhs.lexical);
      auto b = Decimal::parse(rtext);
      if (!a || !b) return unsat("type mismatch");
      return from_bool(*order(*a, op, *b), lhs.lexical, op, rtext);
    }
    case Category::DateTime: {
      auto a = parse_datetime(lhs.lexical);
      auto b = parse_datetime(rtext);
      if (!a || !b) return unsat("type mismatch");
      return from_bool(*order(*a, op, *b), lhs.lexical, op, rtext);
    }
    case Category::Duration: {
      auto a = parse_duration(lhs.lexical);
      auto b = parse_duration(rtext);
      if (!a || !b) return unsat("type mismatch");
      return from_bool(*order(*a, op, *b), lhs.lexical, op, rtext);
    }
    case Category::Text:
      if (op != Operator::Eq && op != Operator::Neq) return unsat("type mismatch");
      return from_bool((lhs.lexical == rtext) == (op == Operator::Eq), lhs.lexical, op, rtext);
  }
  return unsat("type mismatch");
}

Iri expected_datatype(const Constraint& c, const TypedLiteral& lhs, const ProfileRegistry& registry) {
  if (auto info = registry.resolve(c.left_operand); info && info->expected_datatype) {
    return *info->expected_datatype;
  }
  if (const auto* lit = std::get_if<TypedLiteral>(&c.right_operand); lit && lit->datatype != xsd("string")) {
    return lit->datatype;
  }
  return lhs.datatype;
}

// Typed right operands must agree with the operand's datatype category.
bool right_operand_compatible(const Constraint& c, const Iri& expected) {
  const auto* lit = std::get_if<TypedLiteral>(&c.right_operand);
  if (!lit || lit->datatype == xsd("string")) return true;
  return category_of(lit->datatype) == category_of(expected);
}

const Constraint* find_constraint(const Rule& rule, const Iri& left) {
  for (const auto& c : rule.constraints) {
    if (c.left_operand == left) return &c;
  }
  return nullptr;
}

std::optional<std::uint64_t> bound_of(const Constraint& c) {
  auto d = Decimal::parse(term_text(c.right_operand));
  if (!d || d->units() < 0 || d->units() % Decimal::kScale != 0) return std::nullopt;
  return static_cast<std::uint64_t>(d->units() / Decimal::kScale);
}

bool matches(const Rule& rule, const AccessRequest& req, const ProfileRegistry& registry) {
  if (rule.target && *rule.target != req.target) return false;
  if (rule.assignee && *rule.assignee != req.requester) return false;
  return registry.subsumes(rule.action.action, req.action);
}

std::optional<Charge> charge_of(const Rule& permission) {
  for (const auto& duty : permission.duties) {
    if (duty.action.action != odrl("compensate")) continue;
    for (const auto& r : duty.action.refinements) {
      if (r.left_operand != odrl("payAmount")) continue;
      if (auto amount = Decimal::parse(term_text(r.right_operand))) {
        return Charge{*amount, r.unit.value_or(Iri())};
      }
    }
  }
  return std::nullopt;
}

struct RuleResult {
  bool any_unsat = false;
  bool any_undetermined = false;
  std::string first_failure;
};

void record(std::vector<TraceEntry>& trace, RuleResult& res, std::string path, const Constraint& c,
            ConstraintVerdict v) {
  if (v.status == VerdictStatus::Unsatisfied) res.any_unsat = true;
  if (v.status == VerdictStatus::Undetermined) res.any_undetermined = true;
  if (!v.satisfied() && res.first_failure.empty()) res.first_failure = path + ": " + v.reason;
  trace.push_back({std::move(path), c, std::move(v)});
}

RuleResult evaluate_rule(const Rule& rule, const std::string& path, const EvaluationContext& ctx,
                         std::vector<TraceEntry>& trace) {
  RuleResult res;
  for (size_t i = 0; i < rule.action.refinements.size(); ++i) {
    const Constraint& c = rule.action.refinements[i];
    record(trace, res, path + ".refinement[" + std::to_string(i) + "]", c, evaluate_constraint(c, ctx));
  }
  const Constraint* count = find_constraint(rule, odrl("count"));
  const Constraint* window = find_constraint(rule, odrl("timeInterval"));
  bool rate_limited = count && window;
  for (size_t i = 0; i < rule.constraints.size(); ++i) {
    const Constraint& c = rule.constraints[i];
    std::string where = path + ".constraint[" + std::to_string(i) + "]";
    ConstraintVerdict v;
    if (rate_limited && &c == count) {
      v = check_rate_limit(*count, *window, ctx.state.counters(ctx.key), ctx.request.timestamp,
                           ctx.request.units_requested);
    } else if (rate_limited && &c == window) {
      v = sat("rate-limit window");
    } else {
      v = evaluate_constraint(c, ctx);
    }
    record(trace, res, std::move(where), c, std::move(v));
  }
  return res;
}

json term_json(const Term& t) {
  if (const auto* iri = std::get_if<Iri>(&t)) return json{{"iri", iri->value}};
  const auto& lit = std::get<TypedLiteral>(t);
  return json{{"value", lit.lexical}, {"datatype", lit.datatype.value}};
}

json constraint_json(const Constraint& c) {
  json j{{"leftOperand", c.left_operand.value}, {"operator", c.op.value}, {"rightOperand", term_json(c.right_operand)}};
  if (c.unit) j["unit"] = c.unit->value;
  return j;
}

json rule_json(const Rule& r) {
  json j{{"kind", std::string(to_string(r.kind))}, {"action", r.action.action.value}};
  if (r.target) j["target"] = r.target->value;
  if (r.assigner) j["assigner"] = r.assigner->value;
  if (r.assignee) j["assignee"] = r.assignee->value;
  json refs = json::array();
  for (const auto& c : r.action.refinements) refs.push_back(constraint_json(c));
  json cons = json::array();
  for (const auto& c : r.constraints) cons.push_back(constraint_json(c));
  j["refinements"] = refs;
  j["constraints"] = cons;
  return j;
}

}  // namespace

std::string_view to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Satisfied: return "Satisfied";
    case VerdictStatus::Unsatisfied: return "Unsatisfied";
    case VerdictStatus::Undetermined: return "Undetermined";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Permit: return "Permit";
    case Outcome::Deny: return "Deny";
    case Outcome::NotApplicable: return "NotApplicable";
  }
  return "?";
}

ConstraintVerdict evaluate_constraint(const Constraint& c, const EvaluationContext& ctx) {
  auto op = c.kind();
  if (!op) return unsat("unknown operator " + compact(c.op));
  const AccessRequest& req = ctx.request;
  const Iri& left = c.left_operand;

  std::optional<TypedLiteral> value;
  if (left == odrl("count")) {
    const auto& counters = ctx.state.counters(ctx.key);
    value = TypedLiteral{std::to_string(counters.executed_count + req.units_requested), xsd("integer")};
  } else if (left == dsp("concurrentConnections")) {
    const auto& counters = ctx.state.counters(ctx.key);
    value = TypedLiteral{std::to_string(counters.active_connections + 1), xsd("integer")};
  } else if (left == odrl("dateTime")) {
    value = TypedLiteral{format_datetime(req.timestamp), xsd("dateTime")};
  } else if (left == dsp("attestedClaim")) {
    const auto* claim = std::get_if<Iri>(&c.right_operand);
    if (!claim || (*op != Operator::Eq && *op != Operator::Neq)) return unsat("type mismatch");
    auto found = get_attribute({left, req.requester, req.timestamp, *claim}, ctx.pip);
    if (*op == Operator::Neq) return found ? unsat("attested " + compact(*claim)) : sat("no attestation");
    if (!found) return undetermined("no valid attestation for " + compact(*claim));
    return sat("attested " + compact(*claim));
  } else if (auto it = req.attributes.find(left); it != req.attributes.end()) {
    value = it->second;
  } else if (left == odrl("unitOfCount")) {
    return sat("request does not specify a unit");
  } else {
    value = get_attribute({left, req.requester, req.timestamp, std::nullopt}, ctx.pip);
  }
  if (!value) return undetermined("attribute " + compact(left) + " unavailable");

  Iri expected = expected_datatype(c, *value, *ctx.registry);
  if (!right_operand_compatible(c, expected)) return unsat("type mismatch");
  return compare(*value, *op, c.right_operand, expected, ctx.regions);
}

ConstraintVerdict check_rate_limit(const Constraint& count, const Constraint& window, const UsageCounters& counters,
                                   Timestamp now, std::uint64_t units) {
  auto n = bound_of(count);
  auto w = parse_duration(term_text(window.right_operand));
  if (!n || !w) return unsat("type mismatch");
  Timestamp from = now - *w;
  auto recent = static_cast<std::uint64_t>(
      std::count_if(counters.exercise_log.begin(), counters.exercise_log.end(), [&](Timestamp t) { return t > from; }));
  std::string text = std::to_string(recent) + "+" + std::to_string(units) + " in window of " +
                     format_duration(*w) + " vs " + std::to_string(*n);
  return recent + units <= *n ? sat(text) : unsat("rate limit exceeded: " + text);
}

bool is_precondition(const Rule& duty) {
  for (const auto& c : duty.constraints) {
    if (c.left_operand == odrl("event") && c.kind() == Operator::Lt &&
        c.right_operand == Term(odrl("policyUsage"))) {
      return true;
    }
  }
  return false;
}

Decision evaluate_request(const Policy& agreement, const AccessRequest& req, const UsageState& state,
                          const ProviderList& pip, const PdpOptions& options) {
  if (agreement.kind != PolicyKind::Agreement) throw InvalidAgreement("policy is not an Agreement");
  const ProfileRegistry& registry = *options.registry;
  if (auto errors = validate_policy(agreement, registry); !errors.empty()) {
    throw InvalidAgreement(errors[0].path + ": " + errors[0].message);
  }

  Decision d;
  bool prohibited = false;
  bool matched_permission = false;
  bool undetermined_seen = false;
  std::string failure;
  const Rule* granting = nullptr;
  std::optional<UsageKey> granting_key;

  for (size_t i = 0; i < agreement.rules.size(); ++i) {
    const Rule& rule = agreement.rules[i];
    if (rule.kind == RuleKind::Duty || !matches(rule, req, registry)) continue;
    UsageKey key{agreement.uid, req.requester, rule.action.action};
    EvaluationContext ctx{state, req, pip, options.regions, &registry, key};
    std::string path = "rule[" + std::to_string(i) + "]";
    RuleResult res = evaluate_rule(rule, path, ctx, d.trace);

    if (rule.kind == RuleKind::Prohibition) {
      if (!res.any_unsat) {
        prohibited = true;
        if (failure.empty()) failure = "prohibited by " + path;
      }
      continue;
    }
    matched_permission = true;
    if (res.any_undetermined) undetermined_seen = true;
    if (res.any_unsat || res.any_undetermined) {
      if (failure.empty()) failure = res.first_failure;
      continue;
    }
    if (auto charge = charge_of(rule)) {
      auto credit = state.credit_for(agreement.uid, req.requester);
      bool ok = credit && credit->currency == charge->currency && credit->balance >= charge->amount;
      for (size_t j = 0; j < rule.duties.size(); ++j) {
        const auto& refs = rule.duties[j].action.refinements;
        for (size_t k = 0; k < refs.size(); ++k) {
          if (refs[k].left_operand != odrl("payAmount")) continue;
          ConstraintVerdict v = ok ? sat("credit covers " + charge->amount.to_string())
                                   : unsat("insufficient credit for " + charge->amount.to_string());
          d.trace.push_back({path + ".duty[" + std::to_string(j) + "].refinement[" + std::to_string(k) + "]",
                             refs[k], v});
        }
      }
      if (!ok) {
        if (failure.empty()) failure = "insufficient credit";
        continue;
      }
      d.charge = charge;
    }
    if (!granting) {
      granting = &rule;
      granting_key = key;
    }
  }

  if (prohibited) {
    d.outcome = Outcome::Deny;
    d.reason = failure;
  } else if (undetermined_seen) {
    d.outcome = Outcome::Deny;
    d.reason = "undetermined";
  } else if (granting) {
    d.outcome = Outcome::Permit;
    d.usage_key = granting_key;
    d.activated_duties = effective_duties(*granting);
    d.opens_connection = find_constraint(*granting, dsp("concurrentConnections")) != nullptr;
    for (const auto& duty : d.activated_duties) {
      if (is_precondition(duty)) d.preconditions.push_back(duty);
    }
    for (const auto& rule : agreement.rules) {
      if (rule.kind == RuleKind::Duty && is_precondition(rule) && (!rule.target || *rule.target == req.target)) {
        d.preconditions.push_back(rule);
      }
    }
  } else if (matched_permission) {
    d.outcome = Outcome::Deny;
    d.reason = failure;
  } else {
    d.outcome = Outcome::NotApplicable;
    d.reason = "no matching rule";
  }
  if (d.outcome != Outcome::Permit) d.charge.reset();
  return d;
}

UsageState commit_usage(const Decision& decision, const AccessRequest& req, const UsageState& state) {
  if (decision.outcome != Outcome::Permit || !decision.usage_key) {
    throw std::logic_error("commit_usage requires a Permit decision");
  }
  UsageState next = state;
  auto& c = next.usage[*decision.usage_key];
  c.executed_count += req.units_requested;
  c.exercise_log.insert(c.exercise_log.end(), req.units_requested, req.timestamp);
  if (decision.opens_connection) ++c.active_connections;
  if (decision.charge) {
    auto& credit = next.credit[{decision.usage_key->agreement, decision.usage_key->assignee}];
    credit.balance = credit.balance - decision.charge->amount;
  }
  return next;
}

UsageState release_connection(const UsageKey& key, const UsageState& state) {
  UsageState next = state;
  auto it = next.usage.find(key);
  if (it != next.usage.end() && it->second.active_connections > 0) --it->second.active_connections;
  return next;
}

AccessRequest request_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    AccessRequest r;
    r.requester = Iri(j.at("requester").get<std::string>());
    r.target = Iri(j.at("target").get<std::string>());
    r.action = expand_name(j.at("action").get<std::string>());
    auto ts = parse_datetime(j.at("timestamp").get<std::string>());
    if (!ts) throw std::invalid_argument("request: bad timestamp");
    r.timestamp = *ts;
    r.units_requested = j.value("units", std::uint64_t{1});
    if (r.units_requested < 1) throw std::invalid_argument("request: units must be at least 1");
    const json attrs = j.value("attributes", json::object());
    for (const auto& [name, v] : attrs.items()) {
      TypedLiteral lit;
      if (v.is_object()) {
        lit.lexical = v.at("value").get<std::string>();
        lit.datatype = expand_name(v.value("datatype", std::string("xsd:string")));
      } else {
        lit.lexical = v.is_string() ? v.get<std::string>() : v.dump();
      }
      r.attributes[expand_name(name)] = std::move(lit);
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("request: ") + e.what());
  }
}

std::string decision_to_json(const Decision& d) {
  json j{{"outcome", std::string(to_string(d.outcome))}, {"reason", d.reason}};
  json duties = json::array();
  for (const auto& r : d.activated_duties) duties.push_back(rule_json(r));
  json pre = json::array();
  for (const auto& r : d.preconditions) pre.push_back(rule_json(r));
  json trace = json::array();
  for (const auto& t : d.trace) {
    json e = constraint_json(t.constraint);
    e["path"] = t.path;
    e["status"] = std::string(to_string(t.verdict.status));
    e["reason"] = t.verdict.reason;
    trace.push_back(e);
  }
  j["activated_duties"] = duties;
  j["preconditions"] = pre;
  j["trace"] = trace;
  if (d.usage_key) {
    j["usage_key"] = {{"agreement", d.usage_key->agreement.value},
                      {"assignee", d.usage_key->assignee.value},
                      {"action", d.usage_key->action.value}};
  }
  if (d.charge) j["charge"] = {{"amount", d.charge->amount.to_string()}, {"currency", d.charge->currency.value}};
  return j.dump(2);
}

}  // namespace dspolicy
