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

#include "dspolicy/model.hpp"

#include <algorithm>

#include "dspolicy/chrono.hpp"
#include "dspolicy/profile.hpp"

namespace dspolicy {
namespace {

struct OperatorName {
  Operator op;
  std::string_view name;
};

constexpr OperatorName kOperators[] = {
    {Operator::Eq, "eq"},         {Operator::Neq, "neq"},           {Operator::Lt, "lt"},
    {Operator::Lteq, "lteq"},     {Operator::Gt, "gt"},             {Operator::Gteq, "gteq"},
    {Operator::IsPartOf, "isPartOf"}, {Operator::IsAnyOf, "isAnyOf"},
};

std::string field(std::string_view s) { return std::to_string(s.size()) + ":" + std::string(s); }

std::string field(const std::optional<Iri>& iri) { return iri ? field(iri->value) : "-"; }

std::string term_key(const Term& t) {
  if (const auto* iri = std::get_if<Iri>(&t)) return "I" + field(iri->value);
  const auto& lit = std::get<TypedLiteral>(t);
  return "L" + field(lit.lexical) + field(lit.datatype.value);
}

template <typename T>
std::string sorted_block(const std::vector<T>& items) {
  std::vector<std::string> keys;
  keys.reserve(items.size());
  for (const auto& item : items) keys.push_back(fingerprint(item));
  std::sort(keys.begin(), keys.end());
  std::string out = "[";
  for (const auto& k : keys) out += field(k);
  return out + "]";
}

void check_iri(const std::optional<Iri>& iri, const std::string& path, std::string_view what,
               std::vector<Violation>& out) {
  if (iri && !iri->is_absolute()) {
    out.push_back({path, std::string(what) + " is not an absolute IRI: " + iri->value});
  }
}

void check_constraint(const Constraint& c, const std::string& path, std::vector<Violation>& out) {
  if (!c.left_operand.is_absolute()) {
    out.push_back({path, "left operand is not an absolute IRI: " + c.left_operand.value});
  }
  if (!c.kind()) out.push_back({path, "unknown operator " + compact(c.op)});
  if (const auto* lit = std::get_if<TypedLiteral>(&c.right_operand)) {
    if (!literal_well_formed(*lit)) {
      out.push_back({path, "malformed " + compact(lit->datatype) + " literal \"" + lit->lexical + "\""});
    }
  } else if (!std::get<Iri>(c.right_operand).is_absolute()) {
    out.push_back({path, "right operand is not an absolute IRI"});
  }
}

void check_rule(const Rule& rule, const std::string& path, bool nested, std::vector<Violation>& out) {
  if (rule.action.action.empty()) {
    out.push_back({path, "rule has no action"});
  } else if (!rule.action.action.is_absolute()) {
    out.push_back({path, "action is not an absolute IRI: " + rule.action.action.value});
  }
  check_iri(rule.target, path, "target", out);
  check_iri(rule.assigner, path, "assigner", out);
  check_iri(rule.assignee, path, "assignee", out);
  for (size_t i = 0; i < rule.action.refinements.size(); ++i) {
    check_constraint(rule.action.refinements[i], path + ".refinement[" + std::to_string(i) + "]", out);
  }
  for (size_t i = 0; i < rule.constraints.size(); ++i) {
    check_constraint(rule.constraints[i], path + ".constraint[" + std::to_string(i) + "]", out);
  }
  if (nested) {
    if (rule.kind != RuleKind::Duty) out.push_back({path, "nested rule is not a duty"});
    if (!rule.duties.empty()) out.push_back({path, "duty carries nested duties"});
    return;
  }
  if (!rule.duties.empty() && rule.kind != RuleKind::Permission) {
    out.push_back({path, "duties nested under a " + std::string(to_string(rule.kind))});
  }
  for (size_t i = 0; i < rule.duties.size(); ++i) {
    check_rule(rule.duties[i], path + ".duty[" + std::to_string(i) + "]", true, out);
  }
}

void lint_action_and_operands(const Rule& rule, const std::string& path,
                              const ProfileRegistry& registry, std::vector<Violation>& out) {
  if (!rule.action.action.empty() && !registry.is_kind(rule.action.action, TermKind::Action)) {
    out.push_back({path, "unknown action " + compact(rule.action.action)});
  }
  auto lint_constraint = [&](const Constraint& c, const std::string& where) {
    if (!registry.is_kind(c.left_operand, TermKind::LeftOperand)) {
      out.push_back({where, "unknown left operand " + compact(c.left_operand)});
    }
  };
  for (size_t i = 0; i < rule.action.refinements.size(); ++i) {
    lint_constraint(rule.action.refinements[i], path + ".refinement[" + std::to_string(i) + "]");
  }
  for (size_t i = 0; i < rule.constraints.size(); ++i) {
    lint_constraint(rule.constraints[i], path + ".constraint[" + std::to_string(i) + "]");
  }
  for (size_t i = 0; i < rule.duties.size(); ++i) {
    lint_action_and_operands(rule.duties[i], path + ".duty[" + std::to_string(i) + "]", registry, out);
  }
}

}  // namespace

bool literal_well_formed(const TypedLiteral& lit) {
  const auto& dt = lit.datatype;
  if (dt == xsd("dateTime")) return parse_datetime(lit.lexical).has_value();
  if (dt == xsd("duration")) return parse_duration(lit.lexical).has_value();
  if (dt == xsd("decimal") || dt == xsd("double") || dt == xsd("float")) {
    return Decimal::parse(lit.lexical).has_value();
  }
  if (dt == xsd("integer") || dt == xsd("nonNegativeInteger") || dt == xsd("int") ||
      dt == xsd("long")) {
    auto d = Decimal::parse(lit.lexical);
    return d && lit.lexical.find('.') == std::string::npos;
  }
  if (dt == xsd("boolean")) {
    return lit.lexical == "true" || lit.lexical == "false" || lit.lexical == "1" ||
           lit.lexical == "0";
  }
  return true;
}

std::string to_string(const Term& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) return compact(*iri);
  const auto& lit = std::get<TypedLiteral>(term);
  if (lit.datatype == xsd("string")) return "\"" + lit.lexical + "\"";
  return "\"" + lit.lexical + "\"^^" + compact(lit.datatype);
}

std::string_view to_string(PartyRole role) {
  switch (role) {
    case PartyRole::Provider: return "Provider";
    case PartyRole::Consumer: return "Consumer";
    case PartyRole::ThirdParty: return "ThirdParty";
  }
  return "?";
}

std::string_view to_string(Operator op) {
  for (const auto& entry : kOperators) {
    if (entry.op == op) return entry.name;
  }
  return "?";
}

Iri operator_iri(Operator op) { return odrl(to_string(op)); }

std::optional<Operator> operator_from_iri(const Iri& iri) {
  if (iri.value.rfind(ns::kOdrl, 0) != 0) return std::nullopt;
  std::string_view local = std::string_view(iri.value).substr(ns::kOdrl.size());
  for (const auto& entry : kOperators) {
    if (entry.name == local) return entry.op;
  }
  return std::nullopt;
}

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Permission: return "Permission";
    case RuleKind::Prohibition: return "Prohibition";
    case RuleKind::Duty: return "Duty";
  }
  return "?";
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Set: return "Set";
    case PolicyKind::Offer: return "Offer";
    case PolicyKind::Agreement: return "Agreement";
  }
  return "?";
}

std::vector<Violation> validate_policy(const Policy& policy, const ProfileRegistry&) {
  std::vector<Violation> out;
  if (!policy.uid.is_absolute()) {
    out.push_back({"policy", "policy uid is not an absolute IRI: " + policy.uid.value});
  }
  if (policy.rules.empty()) out.push_back({"policy", "policy has no rules"});
  for (size_t i = 0; i < policy.rules.size(); ++i) {
    const Rule& rule = policy.rules[i];
    std::string path = "rule[" + std::to_string(i) + "]";
    check_rule(rule, path, false, out);
    if (policy.kind != PolicyKind::Set && !rule.assigner) {
      out.push_back({path, std::string(to_string(policy.kind)) + " " + path + " has no assigner"});
    }
    if (policy.kind == PolicyKind::Agreement && !rule.assignee) {
      out.push_back({path, "Agreement " + path + " has no assignee"});
    }
  }
  for (const auto& profile : policy.profiles) {
    if (!profile.is_absolute()) out.push_back({"policy", "profile is not an absolute IRI"});
  }
  return out;
}

std::vector<Violation> lint_policy(const Policy& policy, const ProfileRegistry& registry) {
  std::vector<Violation> out;
  for (size_t i = 0; i < policy.rules.size(); ++i) {
    lint_action_and_operands(policy.rules[i], "rule[" + std::to_string(i) + "]", registry, out);
  }
  return out;
}

std::string fingerprint(const Constraint& c) {
  return "C(" + field(c.left_operand.value) + field(c.op.value) + term_key(c.right_operand) +
         field(c.unit) + ")";
}

std::string fingerprint(const Annotation& a) {
  return "N(" + field(a.predicate.value) + (a.value ? term_key(*a.value) : "-") +
         sorted_block(a.nested) + ")";
}

std::string fingerprint(const Rule& r) {
  return "R(" + std::string(to_string(r.kind)) + field(r.target) + field(r.assigner) +
         field(r.assignee) + "A(" + field(r.action.action.value) +
         sorted_block(r.action.refinements) + ")" + sorted_block(r.constraints) +
         sorted_block(r.duties) + sorted_block(r.annotations) + ")";
}

std::string fingerprint(const Policy& p) {
  std::vector<std::string> profiles;
  for (const auto& iri : p.profiles) profiles.push_back(field(iri.value));
  std::sort(profiles.begin(), profiles.end());
  std::string out = "P(" + field(p.uid.value) + std::string(to_string(p.kind)) + "[";
  for (const auto& s : profiles) out += s;
  return out + "]" + sorted_block(p.rules) + sorted_block(p.annotations) + ")";
}

bool semantic_equals(const Policy& a, const Policy& b) { return fingerprint(a) == fingerprint(b); }

bool rules_equal(const std::vector<Rule>& a, const std::vector<Rule>& b) {
  return sorted_block(a) == sorted_block(b);
}

std::vector<Rule> effective_duties(const Rule& permission) {
  std::vector<Rule> out = permission.duties;
  for (auto& duty : out) {
    if (!duty.target) duty.target = permission.target;
    if (!duty.assigner) duty.assigner = permission.assigner;
    if (!duty.assignee) duty.assignee = permission.assignee;
  }
  return out;
}

}  // namespace dspolicy
