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

#include "dspolicy/patterns.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "dspolicy/chrono.hpp"
#include "dspolicy/pip.hpp"

namespace dspolicy {

namespace {

using P = PartyRole;
using E = EnforcementClass;
using T = ParamType;

std::vector<ParamSpec> common_params() {
  return {{"assigner", T::Iri, true}, {"target", T::Iri, true},   {"assignee", T::Iri, false},
          {"action", T::Iri, false},  {"uid", T::Iri, false},     {"kind", T::PolicyKind, false},
          {"profile", T::Iri, false}};
}

PatternDescriptor make(std::string id, std::string name, std::string description, std::set<P> pip, P pap, E e,
                       PatternSource src, std::vector<ParamSpec> extra, std::string encoding) {
  auto schema = common_params();
  schema.insert(schema.end(), extra.begin(), extra.end());
  return {std::move(id), std::move(name), std::move(description), std::move(pip), pap, e, src, std::move(schema),
          std::move(encoding)};
}

std::vector<PatternDescriptor> build_catalog() {
  constexpr auto L = PatternSource::Literature;
  constexpr auto S = PatternSource::SelfDefined;
  return {
      make("allow-access", "Allow access", "Provider allows access to the data for a specific consumer.",
           {P::Provider}, P::Provider, E::Preventive, L, {}, "permission without constraints"),
      make("location-access", "Location / Regional access restriction",
           "Consumer can access data only if located in allowed region.", {P::Provider}, P::Provider, E::Detective, L,
           {{"region", T::String, true}}, "constraint odrl:spatial isPartOf region"),
      make("location-storage", "Location / Regional storage restriction",
           "Consumer can store data only if the storage is located in allowed region.",
           {P::Consumer, P::ThirdParty}, P::Provider, E::Detective, L, {{"region", T::String, true}},
           "duty dsp:store with constraint dsp:storageRegion isPartOf region"),
      make("time-restriction", "Time restriction", "Consumer can access data only in pre-defined time period.",
           {P::Provider}, P::Provider, E::Preventive, L,
           {{"start", T::DateTime, true}, {"end", T::DateTime, true}},
           "constraints odrl:dateTime gteq start and lteq end"),
      make("access-count", "Access count", "Consumer can access the data a fixed number of times.", {P::Provider},
           P::Provider, E::Preventive, L, {{"max_count", T::Integer, true}}, "constraint odrl:count lteq max_count"),
      make("rate-limit", "Rate limit", "Consumer can access the data only a limited number of times within a period.",
           {P::Provider}, P::Provider, E::Preventive, L,
           {{"max_count", T::Integer, true}, {"window", T::Duration, true}},
           "constraints odrl:count lteq max_count and odrl:timeInterval eq window"),
      make("concurrent-connections", "Concurrent active connections",
           "The number of concurrent connections to retrieve the data is limited.", {P::Provider}, P::Provider,
           E::Preventive, L, {{"max_connections", T::Integer, true}},
           "constraint dsp:concurrentConnections lteq max_connections"),
      make("data-amount", "Amount of data", "The amount of data that can be transferred/ streamed is limited.",
           {P::Provider}, P::Provider, E::Preventive, L, {{"unit", T::String, true}, {"max", T::Integer, true}},
           "action odrl:read refined odrl:unitOfCount eq unit, constraint odrl:count lteq max"),
      make("processing-power", "Processing power", "The processing power to prepare/ provide the data is limited.",
           {P::Provider}, P::Provider, E::Preventive, L, {{"max", T::Decimal, true}},
           "constraint dsp:processingPower lteq max"),
      make("bandwidth", "Bandwidth", "The bandwidth to transfer/ stream the data is limited.",
           {P::Provider, P::ThirdParty}, P::Provider, E::Preventive, L, {{"max", T::Decimal, true}},
           "constraint dsp:bandwidth lteq max"),
      make("billing", "Billing / Credit points", "The consumer will be charged for the data accesses.", {P::Provider},
           P::Provider, E::Preventive, L, {{"amount", T::Decimal, true}, {"currency", T::Iri, true}},
           "duty odrl:compensate refined odrl:payAmount eq amount with odrl:unit currency"),
      make("data-quality", "Data quality",
           "The consumer demands certain data quality standards, e.g., schema conformance, data consistency, etc.",
           {P::Consumer}, P::Consumer, E::Detective, S, {{"shape", T::Iri, true}},
           "top-level duty dsp:qualityControl refined dsp:conformsTo eq shape, constraint odrl:event lt "
           "odrl:policyUsage"),
      make("deletion", "Deletion", "Consumer is required to delete data after specific period.",
           {P::Consumer, P::ThirdParty}, P::Provider, E::Detective, L, {{"deadline", T::DateTime, true}},
           "duty odrl:delete with constraint odrl:dateTime lt deadline"),
      make("purpose", "Purpose / Application", "Consumer is restricted to use data for specific purpose only.",
           {P::Consumer, P::ThirdParty}, P::Provider, E::Detective, L, {{"purpose", T::Iri, true}},
           "constraint odrl:purpose eq purpose"),
      make("provable-attribute", "Provable attribute", "Provider demands a certificate/guarantee, e.g. of membership.",
           {P::Provider, P::ThirdParty}, P::Provider, E::Preventive, L, {{"claim", T::Iri, true}},
           "constraint dsp:attestedClaim eq claim"),
      make("encryption-by-consumer", "Encryption by consumer", "Provider demands consumer to store data encrypted.",
           {P::Consumer}, P::Provider, E::Detective, L, {}, "duty dsp:encrypt nested in the permission"),
      make("encryption-by-provider", "Encryption by provider", "Consumer demands provider to transfer data encrypted.",
           {P::Consumer}, P::Consumer, E::Preventive, S, {},
           "top-level duty dsp:encrypt with constraint odrl:event lt odrl:policyUsage"),
      make("aggregation", "Aggregation", "Provider demands consumer to aggregate data before processing.",
           {P::Consumer}, P::Provider, E::Detective, L, {}, "duty odrl:aggregate"),
      make("anonymization", "Anonymization", "Provider demands consumer to anonymize data before processing.",
           {P::Consumer}, P::Provider, E::Detective, L, {}, "duty odrl:anonymize"),
      make("activity-logging", "Activity logging", "Provider demands shared activity logging of the data processing.",
           {P::Consumer}, P::Provider, E::Detective, L, {}, "duty odrl:inform"),
      make("delegation", "Delegation of permission",
           "Provider demands to attach a certain policy when distributing the data.", {P::Consumer}, P::Provider,
           E::Detective, L, {{"policy", T::Iri, true}}, "duty odrl:nextPolicy targeting the policy to attach"),
      make("up-to-dateness", "Up-to-dateness", "Consumer demands that the data is updated with a specified frequency.",
           {P::Consumer}, P::Provider, E::Detective, S, {{"interval", T::Duration, true}},
           "top-level duty dsp:update with constraint odrl:timeInterval eq interval"),
  };
}

// Parameter access with type checks.
class Args {
 public:
  Args(const PatternDescriptor& d, const Params& p) : desc_(d), p_(p) {
    if (!p_.is_object()) throw PatternError("parameters must be a JSON object");
    for (const auto& param : d.parameter_schema) {
      if (param.required && !has(param.name)) throw PatternError(d.id + ": missing parameter '" + param.name + "'");
      if (has(param.name)) check(param);
    }
  }

  bool has(const std::string& name) const { return p_.contains(name) && !p_.at(name).is_null(); }

  Iri iri(const std::string& name) const { return expand_name(p_.at(name).get<std::string>()); }
  std::string text(const std::string& name) const { return p_.at(name).get<std::string>(); }
  std::string integer(const std::string& name) const { return std::to_string(p_.at(name).get<std::uint64_t>()); }
  std::string decimal(const std::string& name) const { return decimal_of(p_.at(name))->to_string(); }
  std::optional<Iri> optional_iri(const std::string& name) const {
    return has(name) ? std::optional<Iri>(iri(name)) : std::nullopt;
  }

 private:
  static std::optional<Decimal> decimal_of(const Params& v) {
    if (v.is_string()) return Decimal::parse(v.get<std::string>());
    if (v.is_number_integer()) return Decimal::parse(v.dump());
    if (v.is_number_float()) return Decimal::parse(v.dump());
    return std::nullopt;
  }

  void check(const ParamSpec& param) const {
    const Params& v = p_.at(param.name);
    bool ok = true;
    switch (param.type) {
      case T::Iri: ok = v.is_string() && expand_name(v.get<std::string>()).is_absolute(); break;
      case T::String: ok = v.is_string() && !v.get<std::string>().empty(); break;
      case T::Integer: ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); break;
      case T::Decimal: ok = decimal_of(v).has_value(); break;
      case T::DateTime: ok = v.is_string() && parse_datetime(v.get<std::string>()).has_value(); break;
      case T::Duration: ok = v.is_string() && parse_duration(v.get<std::string>()).has_value(); break;
      case T::PolicyKind: {
        std::string k = v.is_string() ? v.get<std::string>() : "";
        ok = k == "Set" || k == "Offer" || k == "Agreement";
        break;
      }
    }
    if (!ok) {
      throw PatternError(desc_.id + ": parameter '" + param.name + "' must be " + std::string(to_string(param.type)));
    }
  }

  const PatternDescriptor& desc_;
  const Params& p_;
};

struct Fragment {
  std::vector<Constraint> constraints;
  std::vector<Constraint> refinements;
  std::vector<Rule> nested;
  std::vector<Rule> top;
  bool needs_carrier = true;
  std::optional<Iri> default_action;
};

Constraint dt_constraint(Operator op, const std::string& lexical) {
  return {odrl("dateTime"), op, TypedLiteral{lexical, xsd("dateTime")}};
}

Rule duty(Iri action, const std::optional<Iri>& target, std::vector<Constraint> constraints = {},
          std::vector<Constraint> refinements = {}) {
  Rule r;
  r.kind = RuleKind::Duty;
  r.target = target;
  r.action = ActionExpression(std::move(action), std::move(refinements));
  r.constraints = std::move(constraints);
  return r;
}

Constraint before_usage() { return {odrl("event"), Operator::Lt, odrl("policyUsage")}; }

Fragment fragment_for(const std::string& id, const Args& a) {
  Fragment f;
  std::optional<Iri> target = a.iri("target");
  auto top_duty = [&](Rule r) {
    r.assigner = a.iri("assigner");
    r.assignee = a.optional_iri("assignee");
    f.top.push_back(std::move(r));
    f.needs_carrier = false;
  };
  if (id == "allow-access") {
  } else if (id == "location-access") {
    f.constraints.push_back({odrl("spatial"), Operator::IsPartOf, plain_literal(a.text("region"))});
  } else if (id == "location-storage") {
    f.nested.push_back(
        duty(dsp("store"), target, {Constraint(dsp("storageRegion"), Operator::IsPartOf, plain_literal(a.text("region")))}));
  } else if (id == "time-restriction") {
    f.constraints.push_back(dt_constraint(Operator::Gteq, a.text("start")));
    f.constraints.push_back(dt_constraint(Operator::Lteq, a.text("end")));
  } else if (id == "access-count") {
    f.constraints.push_back({odrl("count"), Operator::Lteq, plain_literal(a.integer("max_count"))});
  } else if (id == "rate-limit") {
    f.constraints.push_back({odrl("count"), Operator::Lteq, plain_literal(a.integer("max_count"))});
    f.constraints.push_back({odrl("timeInterval"), Operator::Eq, TypedLiteral{a.text("window"), xsd("duration")}});
  } else if (id == "concurrent-connections") {
    f.constraints.push_back({dsp("concurrentConnections"), Operator::Lteq, plain_literal(a.integer("max_connections"))});
  } else if (id == "data-amount") {
    f.default_action = odrl("read");
    f.refinements.push_back({odrl("unitOfCount"), Operator::Eq, plain_literal(a.text("unit"))});
    f.constraints.push_back({odrl("count"), Operator::Lteq, plain_literal(a.integer("max"))});
  } else if (id == "processing-power") {
    f.constraints.push_back({dsp("processingPower"), Operator::Lteq, plain_literal(a.decimal("max"))});
  } else if (id == "bandwidth") {
    f.constraints.push_back({dsp("bandwidth"), Operator::Lteq, plain_literal(a.decimal("max"))});
  } else if (id == "billing") {
    f.nested.push_back(duty(odrl("compensate"), target, {},
                            {Constraint(odrl("payAmount"), Operator::Eq, TypedLiteral{a.decimal("amount"), xsd("decimal")},
                                        a.iri("currency"))}));
  } else if (id == "data-quality") {
    top_duty(duty(dsp("qualityControl"), target, {before_usage()},
                  {Constraint(dsp("conformsTo"), Operator::Eq, a.iri("shape"))}));
  } else if (id == "deletion") {
    f.nested.push_back(duty(odrl("delete"), target, {dt_constraint(Operator::Lt, a.text("deadline"))}));
  } else if (id == "purpose") {
    f.constraints.push_back({odrl("purpose"), Operator::Eq, a.iri("purpose")});
  } else if (id == "provable-attribute") {
    f.constraints.push_back({dsp("attestedClaim"), Operator::Eq, a.iri("claim")});
  } else if (id == "encryption-by-consumer") {
    f.nested.push_back(duty(dsp("encrypt"), target));
  } else if (id == "encryption-by-provider") {
    top_duty(duty(dsp("encrypt"), target, {before_usage()}));
  } else if (id == "aggregation") {
    f.nested.push_back(duty(odrl("aggregate"), target));
  } else if (id == "anonymization") {
    f.nested.push_back(duty(odrl("anonymize"), target));
  } else if (id == "activity-logging") {
    f.nested.push_back(duty(odrl("inform"), target));
  } else if (id == "delegation") {
    f.nested.push_back(duty(odrl("nextPolicy"), a.iri("policy")));
  } else if (id == "up-to-dateness") {
    top_duty(duty(dsp("update"), target, {Constraint(odrl("timeInterval"), Operator::Eq,
                                                     TypedLiteral{a.text("interval"), xsd("duration")})}));
  }
  return f;
}

bool uses_dsp(const Policy& p) {
  bool found = false;
  auto check = [&](const Iri& iri) { found = found || iri.value.rfind(ns::kDsp, 0) == 0; };
  auto check_c = [&](const Constraint& c) {
    check(c.left_operand);
    if (const auto* iri = std::get_if<Iri>(&c.right_operand)) check(*iri);
  };
  for_each_rule(p, [&](const Rule& r, const Rule*) {
    check(r.action.action);
    for (const auto& c : r.action.refinements) check_c(c);
    for (const auto& c : r.constraints) check_c(c);
  });
  return found;
}

PolicyKind kind_of(const std::string& k) {
  if (k == "Set") return PolicyKind::Set;
  if (k == "Agreement") return PolicyKind::Agreement;
  return PolicyKind::Offer;
}

bool has_constraint(const Rule& r, const Iri& left) {
  return std::any_of(r.constraints.begin(), r.constraints.end(), [&](const Constraint& c) { return c.left_operand == left; });
}

bool has_refinement(const Rule& r, const Iri& left) {
  return std::any_of(r.action.refinements.begin(), r.action.refinements.end(),
                     [&](const Constraint& c) { return c.left_operand == left; });
}

bool any_duty(const Policy& p, bool nested, const Iri& action, const std::function<bool(const Rule&)>& extra = {}) {
  bool found = false;
  for (const auto& r : p.rules) {
    if (nested) {
      for (const auto& d : r.duties) {
        if (d.action.action == action && (!extra || extra(d))) found = true;
      }
    } else if (r.kind == RuleKind::Duty && r.action.action == action && (!extra || extra(r))) {
      found = true;
    }
  }
  return found;
}

bool any_permission(const Policy& p, const std::function<bool(const Rule&)>& pred) {
  return std::any_of(p.rules.begin(), p.rules.end(),
                     [&](const Rule& r) { return r.kind == RuleKind::Permission && pred(r); });
}

}  // namespace

std::string_view to_string(EnforcementClass c) { return c == E::Preventive ? "Preventive" : "Detective"; }
std::string_view to_string(PatternSource s) { return s == PatternSource::Literature ? "Literature" : "SelfDefined"; }

std::string_view to_string(ParamType t) {
  switch (t) {
    case T::Iri: return "an IRI";
    case T::String: return "a non-empty string";
    case T::Integer: return "a non-negative integer";
    case T::Decimal: return "a decimal";
    case T::DateTime: return "an xsd:dateTime";
    case T::Duration: return "an xsd:duration";
    case T::PolicyKind: return "one of Set, Offer, Agreement";
  }
  return "?";
}

const std::vector<PatternDescriptor>& list_patterns() {
  static const std::vector<PatternDescriptor> catalog = build_catalog();
  return catalog;
}

const PatternDescriptor& find_pattern(std::string_view id) {
  for (const auto& d : list_patterns()) {
    if (d.id == id) return d;
  }
  throw PatternError("unknown pattern '" + std::string(id) + "'");
}

std::string descriptor_to_json(const PatternDescriptor& d) {
  nlohmann::ordered_json j;
  j["id"] = d.id;
  j["name"] = d.name;
  j["description"] = d.description;
  auto pip = nlohmann::ordered_json::array();
  for (auto r : d.pip_roles) pip.push_back(std::string(to_string(r)));
  j["pip"] = pip;
  j["pap_pdp"] = std::string(to_string(d.pap_pdp_role));
  j["enforcement"] = std::string(to_string(d.enforcement_class));
  j["source"] = std::string(to_string(d.source));
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : d.parameter_schema) {
    params.push_back({{"name", p.name}, {"type", std::string(to_string(p.type))}, {"required", p.required}});
  }
  j["parameters"] = params;
  j["encoding"] = d.encoding;
  return j.dump();
}

std::string catalog_markdown() {
  std::string out = "| id | pattern | description | PIP | PAP/PDP | enforcement | source | parameters | encoding |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& d : list_patterns()) {
    std::string pip, params;
    for (auto r : d.pip_roles) pip += (pip.empty() ? "" : ", ") + std::string(to_string(r));
    for (const auto& p : d.parameter_schema) {
      if (p.name == "assigner" || p.name == "target" || p.name == "assignee" || p.name == "action" ||
          p.name == "uid" || p.name == "kind" || p.name == "profile") {
        continue;
      }
      params += (params.empty() ? "" : ", ") + p.name;
    }
    out += "| " + d.id + " | " + d.name + " | " + d.description + " | " + pip + " | " +
           std::string(to_string(d.pap_pdp_role)) + " | " + std::string(to_string(d.enforcement_class)) + " | " +
           std::string(to_string(d.source)) + " | " + (params.empty() ? "-" : params) + " | " + d.encoding + " |\n";
  }
  return out;
}

Policy instantiate(std::string_view id, const Params& params) {
  if (!params.is_object()) throw PatternError("parameters must be a JSON object");
  std::vector<std::pair<std::string, Params>> uses{{std::string(id), params}};
  if (params.contains("with")) {
    const Params& with = params.at("with");
    if (!with.is_array()) throw PatternError("parameter 'with' must be an array");
    for (const auto& w : with) {
      if (!w.is_object() || !w.contains("pattern") || !w.at("pattern").is_string()) {
        throw PatternError("each 'with' entry needs a 'pattern' id");
      }
      Params merged = params;
      merged.erase("with");
      for (const auto& [k, v] : w.items()) {
        if (k != "pattern") merged[k] = v;
      }
      uses.emplace_back(w.at("pattern").get<std::string>(), std::move(merged));
    }
  }

  std::vector<Fragment> fragments;
  std::string ids;
  for (const auto& [pid, p] : uses) {
    const PatternDescriptor& d = find_pattern(pid);
    Args args(d, p);
    fragments.push_back(fragment_for(d.id, args));
    ids += (ids.empty() ? "" : "+") + d.id;
  }

  Args outer(find_pattern(id), params);
  Policy policy;
  policy.uid = outer.has("uid") ? outer.iri("uid") : Iri("http://example.com/policies#" + ids);
  policy.kind = outer.has("kind") ? kind_of(outer.text("kind")) : PolicyKind::Offer;

  bool carrier_needed = std::any_of(fragments.begin(), fragments.end(), [](const Fragment& f) { return f.needs_carrier; });
  if (carrier_needed) {
    Rule perm;
    perm.kind = RuleKind::Permission;
    perm.target = outer.iri("target");
    perm.assigner = outer.iri("assigner");
    perm.assignee = outer.optional_iri("assignee");
    Iri action = odrl("use");
    for (const auto& f : fragments) {
      if (f.default_action) action = *f.default_action;
    }
    if (outer.has("action")) action = outer.iri("action");
    perm.action = ActionExpression(action);
    for (auto& f : fragments) {
      for (auto& c : f.refinements) perm.action.refinements.push_back(std::move(c));
      for (auto& c : f.constraints) perm.constraints.push_back(std::move(c));
      for (auto& r : f.nested) perm.duties.push_back(std::move(r));
    }
    policy.rules.push_back(std::move(perm));
  }
  for (auto& f : fragments) {
    for (auto& r : f.top) policy.rules.push_back(std::move(r));
  }
  if (outer.has("profile")) {
    policy.profiles = {outer.iri("profile")};
  } else {
    policy.profiles = {uses_dsp(policy) ? dsp_profile() : odrl_core_profile()};
  }
  return policy;
}

std::vector<std::string> classify(const Policy& p) {
  std::map<std::string, bool> hit;
  auto perm_has = [&](const Iri& left) { return any_permission(p, [&](const Rule& r) { return has_constraint(r, left); }); };
  hit["allow-access"] = any_permission(p, [](const Rule& r) {
    return r.constraints.empty() && r.action.refinements.empty() && r.duties.empty();
  });
  hit["location-access"] = perm_has(odrl("spatial"));
  auto store_check = [](const Rule& d) { return has_constraint(d, dsp("storageRegion")); };
  hit["location-storage"] = any_duty(p, true, dsp("store"), store_check) || any_duty(p, false, dsp("store"), store_check);
  hit["time-restriction"] = perm_has(odrl("dateTime"));
  hit["access-count"] = any_permission(p, [](const Rule& r) {
    return has_constraint(r, odrl("count")) && !has_constraint(r, odrl("timeInterval")) &&
           !has_refinement(r, odrl("unitOfCount"));
  });
  hit["rate-limit"] = any_permission(
      p, [](const Rule& r) { return has_constraint(r, odrl("count")) && has_constraint(r, odrl("timeInterval")); });
  hit["concurrent-connections"] = perm_has(dsp("concurrentConnections"));
  hit["data-amount"] = any_permission(
      p, [](const Rule& r) { return has_constraint(r, odrl("count")) && has_refinement(r, odrl("unitOfCount")); });
  hit["processing-power"] = perm_has(dsp("processingPower"));
  hit["bandwidth"] = perm_has(dsp("bandwidth"));
  hit["billing"] = any_duty(p, true, odrl("compensate")) || any_duty(p, false, odrl("compensate"));
  auto qc = [](const Rule& d) { return has_refinement(d, dsp("conformsTo")); };
  hit["data-quality"] = any_duty(p, false, dsp("qualityControl"), qc) || any_duty(p, true, dsp("qualityControl"), qc);
  hit["deletion"] = any_duty(p, true, odrl("delete")) || any_duty(p, false, odrl("delete"));
  hit["purpose"] = perm_has(odrl("purpose"));
  hit["provable-attribute"] = perm_has(dsp("attestedClaim"));
  hit["encryption-by-consumer"] = any_duty(p, true, dsp("encrypt"));
  hit["encryption-by-provider"] = any_duty(p, false, dsp("encrypt"));
  hit["aggregation"] = any_duty(p, true, odrl("aggregate")) || any_duty(p, false, odrl("aggregate"));
  hit["anonymization"] = any_duty(p, true, odrl("anonymize")) || any_duty(p, false, odrl("anonymize"));
  hit["activity-logging"] = any_duty(p, true, odrl("inform")) || any_duty(p, false, odrl("inform"));
  hit["delegation"] = any_duty(p, true, odrl("nextPolicy")) || any_duty(p, false, odrl("nextPolicy"));
  auto periodic = [](const Rule& d) { return has_constraint(d, odrl("timeInterval")); };
  hit["up-to-dateness"] = any_duty(p, false, dsp("update"), periodic) || any_duty(p, true, dsp("update"), periodic);

  std::vector<std::string> out;
  for (const auto& d : list_patterns()) {
    if (hit[d.id]) out.push_back(d.id);
  }
  return out;
}

}  // namespace dspolicy
