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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/chrono.hpp"
#include "dspolicy/model.hpp"
#include "dspolicy/state.hpp"

namespace dspolicy {

struct AttributeQuery {
  Iri operand;
  /// Party or asset the attribute describes.
  Iri subject;
  Timestamp at;
  /// Extra selector, e.g. the claim asked of an attestation provider.
  std::optional<Iri> qualifier;
};

class AttributeProvider {
 public:
  virtual ~AttributeProvider() = default;
  /// nullopt means the provider cannot answer.
  virtual std::optional<TypedLiteral> get(const AttributeQuery& query) const = 0;
};

using ProviderList = std::vector<std::shared_ptr<const AttributeProvider>>;

/// First answer from `providers` in order; nullopt is Unavailable.
std::optional<TypedLiteral> get_attribute(const AttributeQuery& query, const ProviderList& providers);

/// Answers odrl:dateTime with the query time.
class ClockProvider : public AttributeProvider {
 public:
  std::optional<TypedLiteral> get(const AttributeQuery& query) const override;
};

/// Fixed (subject, operand) → value table.
class StaticAttributeProvider : public AttributeProvider {
 public:
  void set(const Iri& subject, const Iri& operand, TypedLiteral value);
  void erase(const Iri& subject, const Iri& operand);
  std::optional<TypedLiteral> get(const AttributeQuery& query) const override;

  /// {"<subject IRI>": {"<operand>": "value" | {"value": "...", "datatype": "..."}}}.
  /// Operands may be full IRIs or odrl:/dsp: prefixed names.
  static StaticAttributeProvider from_json(std::string_view text);

 private:
  std::map<std::pair<Iri, Iri>, TypedLiteral> values_;
};

/// Answers dsp:concurrentConnections with the subject's open connections
/// summed over all agreements.
class ConnectionCountProvider : public AttributeProvider {
 public:
  explicit ConnectionCountProvider(const UsageState& state) : state_(state) {}
  std::optional<TypedLiteral> get(const AttributeQuery& query) const override;

 private:
  const UsageState& state_;
};

class RegionHierarchy {
 public:
  RegionHierarchy() = default;
  /// JSON object: region code → list of child codes.
  static RegionHierarchy from_json(std::string_view text);

  void add_child(const std::string& parent, const std::string& child);
  bool known(std::string_view code) const;
  const std::vector<std::string>& children(std::string_view code) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
  std::set<std::string, std::less<>> codes_;
};

/// True iff inner == outer or inner is a descendant of outer. Unknown codes
/// yield false and a warning.
bool region_contains(std::string_view outer, std::string_view inner, const RegionHierarchy& hierarchy);

struct Attestation {
  Iri issuer;
  Iri subject;
  Iri claim;
  TypedLiteral value;
  Timestamp expires;
  /// Base64 HMAC-SHA256 over the other fields.
  std::string tag;

  bool operator==(const Attestation&) const = default;
};

Attestation issue_attestation(Iri issuer, Iri subject, Iri claim, TypedLiteral value, Timestamp expires,
                              std::string_view key);

struct VerifyResult {
  bool ok = false;
  std::string reason;
  explicit operator bool() const { return ok; }
};

VerifyResult verify_attestation(const Attestation& a, std::string_view issuer_key, Timestamp now);

/// Issuer IRI → shared secret.
using KeyRing = std::map<Iri, std::string>;
VerifyResult verify_attestation(const Attestation& a, const KeyRing& keys, Timestamp now);

/// Single-line JSON with fields issuer, subject, claim, value{lexical,datatype},
/// expires, tag.
std::string attestation_to_json(const Attestation& a);
/// Throws std::invalid_argument on malformed input.
Attestation attestation_from_json(std::string_view line);

/// Serves verified attestations. Queries for dsp:attestedClaim match the
/// qualifier against the claim; other operands match the claim IRI directly.
class AttestationProvider : public AttributeProvider {
 public:
  explicit AttestationProvider(KeyRing keys) : keys_(std::move(keys)) {}
  void add(Attestation a) { attestations_.push_back(std::move(a)); }
  std::optional<TypedLiteral> get(const AttributeQuery& query) const override;

 private:
  KeyRing keys_;
  std::vector<Attestation> attestations_;
};

/// Expands odrl:/dsp:/xsd:/rdf:/rdfs:/sh:/dc11: names; other text is returned as-is.
Iri expand_name(std::string_view name);

}  // namespace dspolicy
