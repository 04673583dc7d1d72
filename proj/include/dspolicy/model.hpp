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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dspolicy/vocab.hpp"

namespace dspolicy {

class ProfileRegistry;

struct TypedLiteral {
  std::string lexical;
  Iri datatype = xsd("string");

  bool operator==(const TypedLiteral&) const = default;
};

/// Right operands, annotation values and attribute values are either an IRI
/// or a literal.
using Term = std::variant<Iri, TypedLiteral>;

std::string to_string(const Term& term);
/// Lexical form parses under its datatype (dateTime, duration, numeric, boolean).
bool literal_well_formed(const TypedLiteral& literal);
inline TypedLiteral plain_literal(std::string lexical) { return {std::move(lexical), xsd("string")}; }

enum class PartyRole { Provider, Consumer, ThirdParty };
std::string_view to_string(PartyRole role);

enum class Operator { Eq, Neq, Lt, Lteq, Gt, Gteq, IsPartOf, IsAnyOf };
std::string_view to_string(Operator op);
Iri operator_iri(Operator op);
std::optional<Operator> operator_from_iri(const Iri& iri);

struct Constraint {
  Iri left_operand;
  /// Operator IRI as written. Unknown operators survive parsing so that
  /// validation can report them.
  Iri op;
  Term right_operand;
  std::optional<Iri> unit;

  Constraint() = default;
  Constraint(Iri left, Operator o, Term right, std::optional<Iri> u = std::nullopt)
      : left_operand(std::move(left)), op(operator_iri(o)), right_operand(std::move(right)),
        unit(std::move(u)) {}

  std::optional<Operator> kind() const { return operator_from_iri(op); }
  bool operator==(const Constraint&) const = default;
};

struct ActionExpression {
  Iri action;
  std::vector<Constraint> refinements;

  ActionExpression() = default;
  explicit ActionExpression(Iri a, std::vector<Constraint> r = {})
      : action(std::move(a)), refinements(std::move(r)) {}
  bool operator==(const ActionExpression&) const = default;
};

/// A predicate/object pair the parser did not interpret. Blank-node objects
/// keep their own predicate list in `nested`.
struct Annotation {
  Iri predicate;
  std::optional<Term> value;
  std::vector<Annotation> nested;

  bool operator==(const Annotation&) const = default;
};

enum class RuleKind { Permission, Prohibition, Duty };
std::string_view to_string(RuleKind kind);

struct Rule {
  RuleKind kind = RuleKind::Permission;
  std::optional<Iri> target;
  std::optional<Iri> assigner;
  std::optional<Iri> assignee;
  ActionExpression action;
  std::vector<Constraint> constraints;
  /// Only Permissions carry duties; each duty has kind Duty and no duties.
  std::vector<Rule> duties;
  std::vector<Annotation> annotations;

  bool operator==(const Rule&) const = default;
};

enum class PolicyKind { Set, Offer, Agreement };
std::string_view to_string(PolicyKind kind);

struct Policy {
  Iri uid;
  PolicyKind kind = PolicyKind::Set;
  std::vector<Iri> profiles;
  std::vector<Rule> rules;
  std::vector<Annotation> annotations;

  bool operator==(const Policy&) const = default;
};

struct Asset {
  Iri uid;
  std::optional<std::string> title;
};

struct Violation {
  /// Human-readable location, e.g. "rule[0].duty[1].constraint[0]".
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Structural violations of the information model. Empty means valid.
std::vector<Violation> validate_policy(const Policy& policy, const ProfileRegistry& registry);

/// Vocabulary warnings: terms the registry does not know.
std::vector<Violation> lint_policy(const Policy& policy, const ProfileRegistry& registry);

/// Isomorphism up to blank-node identity and ordering of rules, constraints,
/// refinements, duties, profiles and annotations.
bool semantic_equals(const Policy& a, const Policy& b);
bool rules_equal(const std::vector<Rule>& a, const std::vector<Rule>& b);

/// Order-independent canonical encoding; equal fingerprints iff semantic_equals.
std::string fingerprint(const Policy& policy);
std::string fingerprint(const Rule& rule);
std::string fingerprint(const Constraint& constraint);
std::string fingerprint(const Annotation& annotation);

/// Duties of `permission` with the permission's target and parties filled in
/// where the duty leaves them unset.
std::vector<Rule> effective_duties(const Rule& permission);

/// Visits every rule, including nested duties. `parent` is null for top-level rules.
template <typename Fn>
void for_each_rule(const Policy& policy, Fn&& fn) {
  for (const auto& rule : policy.rules) {
    fn(rule, static_cast<const Rule*>(nullptr));
    for (const auto& duty : rule.duties) fn(duty, &rule);
  }
}

}  // namespace dspolicy
