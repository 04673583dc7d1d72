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

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/model.hpp"
#include "dspolicy/pip.hpp"
#include "dspolicy/profile.hpp"
#include "dspolicy/state.hpp"

namespace dspolicy {

struct AccessRequest {
  Iri requester;
  Iri target;
  Iri action;
  Timestamp timestamp;
  std::uint64_t units_requested = 1;
  /// Requester-supplied claims, e.g. odrl:purpose.
  std::map<Iri, TypedLiteral> attributes;
};

/// JSON: {"requester","target","action","timestamp","units","attributes":{name: value}}.
/// Throws std::invalid_argument.
AccessRequest request_from_json(std::string_view text);

enum class VerdictStatus { Satisfied, Unsatisfied, Undetermined };
std::string_view to_string(VerdictStatus status);

struct ConstraintVerdict {
  VerdictStatus status = VerdictStatus::Satisfied;
  std::string reason;

  bool satisfied() const { return status == VerdictStatus::Satisfied; }
};

struct TraceEntry {
  /// Location inside the agreement, e.g. "rule[0].refinement[0]".
  std::string path;
  Constraint constraint;
  ConstraintVerdict verdict;
};

enum class Outcome { Permit, Deny, NotApplicable };
std::string_view to_string(Outcome outcome);

struct Charge {
  Decimal amount;
  Iri currency;
};

struct Decision {
  Outcome outcome = Outcome::NotApplicable;
  std::string reason;
  /// Duties of the granting permission, parties and target filled in.
  std::vector<Rule> activated_duties;
  std::vector<TraceEntry> trace;
  /// Counters the request is charged against; set on Permit.
  std::optional<UsageKey> usage_key;
  bool opens_connection = false;
  std::optional<Charge> charge;
  /// Duties that must be fulfilled before usage (constraint event lt policyUsage).
  std::vector<Rule> preconditions;
};

std::string decision_to_json(const Decision& decision);

class InvalidAgreement : public std::runtime_error {
 public:
  explicit InvalidAgreement(const std::string& detail) : std::runtime_error("invalid agreement: " + detail) {}
};

struct EvaluationContext {
  const UsageState& state;
  const AccessRequest& request;
  const ProviderList& pip;
  const RegionHierarchy* regions = nullptr;
  const ProfileRegistry* registry = &ProfileRegistry::builtin();
  /// Counters consulted for count-like operands.
  UsageKey key;
};

ConstraintVerdict evaluate_constraint(const Constraint& c, const EvaluationContext& ctx);

/// Sliding window: Satisfied iff exercises with timestamp > now - W, plus
/// units, is at most N.
ConstraintVerdict check_rate_limit(const Constraint& count, const Constraint& window, const UsageCounters& counters,
                                   Timestamp now, std::uint64_t units);

struct PdpOptions {
  const RegionHierarchy* regions = nullptr;
  const ProfileRegistry* registry = &ProfileRegistry::builtin();
};

/// Deny-overrides; Undetermined on a matching permission denies. Throws
/// InvalidAgreement when `agreement` is not a valid Agreement.
Decision evaluate_request(const Policy& agreement, const AccessRequest& req, const UsageState& state,
                          const ProviderList& pip, const PdpOptions& options = {});

/// Functional update. Throws std::logic_error unless decision is a Permit.
UsageState commit_usage(const Decision& decision, const AccessRequest& req, const UsageState& state);

/// Closes one connection opened under `key`.
UsageState release_connection(const UsageKey& key, const UsageState& state);

/// True when the constraint is an event-before-usage marker.
bool is_precondition(const Rule& duty);

class ConformanceChecker {
 public:
  virtual ~ConformanceChecker() = default;
  virtual bool check(std::string_view data, const Iri& shape) const = 0;
};

class NoChecker : public std::runtime_error {
 public:
  explicit NoChecker(const Iri& shape) : std::runtime_error("no checker for shape " + shape.value) {}
};

class ConformanceRegistry {
 public:
  void add(const Iri& shape, std::shared_ptr<const ConformanceChecker> checker);
  const ConformanceChecker* find(const Iri& shape) const;

 private:
  std::map<Iri, std::shared_ptr<const ConformanceChecker>> checkers_;
};

/// Throws NoChecker when nothing is registered for `shape`.
bool check_conformance(std::string_view asset_data, const Iri& shape, const ConformanceRegistry& checkers);

struct PropertyShape {
  Iri path;
  std::uint64_t min_count = 0;
  std::optional<std::uint64_t> max_count;
  std::optional<Iri> datatype;
};

/// Node shapes with sh:property / sh:path / sh:minCount / sh:maxCount /
/// sh:datatype, checked against JSON records. Record keys match a path by
/// full IRI or by local name. A JSON array is conformant when every element is.
class MinimalShapeChecker : public ConformanceChecker,
                            public std::enable_shared_from_this<MinimalShapeChecker> {
 public:
  static std::shared_ptr<MinimalShapeChecker> from_turtle(std::string_view text);

  bool check(std::string_view data, const Iri& shape) const override;
  std::vector<Iri> shapes() const;
  const std::vector<PropertyShape>* properties(const Iri& shape) const;
  /// Registers every loaded shape.
  void register_all(ConformanceRegistry& registry) const;

 private:
  std::map<Iri, std::vector<PropertyShape>> shapes_;
};

}  // namespace dspolicy
