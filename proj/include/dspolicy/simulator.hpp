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

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/enforcement.hpp"
#include "json.hpp"

namespace dspolicy {

enum class Phase { Offered, Requested, Agreed, Declined, Revoked };
std::string_view to_string(Phase phase);

struct IllegalTransition : std::logic_error {
  using std::logic_error::logic_error;
};

/// Thrown for malformed or inconsistent scenarios, before anything runs.
struct ScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

bool legal_transition(Phase from, Phase to);

struct NegotiationState {
  std::string id;
  Phase phase = Phase::Offered;
  Policy offer;
  std::optional<Policy> agreement;
  std::string reason;

  /// Throws IllegalTransition.
  void transition(Phase to);
};

/// Records every transition it is shown; anything illegal is kept, not thrown.
class TransitionMonitor {
 public:
  void observe(const std::string& id, Phase from, Phase to);
  size_t observed() const { return observed_; }
  const std::vector<std::string>& illegal() const { return illegal_; }

 private:
  size_t observed_ = 0;
  std::vector<std::string> illegal_;
};

/// Offer with the consumer filled in as assignee wherever none is given,
/// kind set to Agreement and a uid derived from the offer and `negotiation_id`.
Policy bind_agreement(const Policy& offer, const Iri& consumer, const std::string& negotiation_id);

NegotiationState open_negotiation(std::string id, Policy offer);

/// Offered → Requested → Agreed (accept) or Declined. An invalid offer is
/// Declined with the validation message as reason.
NegotiationState negotiate(NegotiationState state, const Iri& consumer, bool accept,
                           const ProfileRegistry& registry = ProfileRegistry::builtin(),
                           TransitionMonitor* monitor = nullptr);
NegotiationState negotiate(const Policy& offer, const Iri& consumer, bool accept = true);

NegotiationState revoke(NegotiationState state, TransitionMonitor* monitor = nullptr);

struct CatalogAsset {
  Iri id;
  std::string title;
  std::string payload;
};

struct OfferSpec {
  std::string id;
  Iri asset;
  Policy policy;
};

struct ScriptEntry {
  Timestamp at;
  /// negotiate, request, evidence, skip-duty, release, revoke, set-attribute
  std::string action;
  nlohmann::json args;
};

struct Scenario {
  std::string name;
  Iri provider;
  Iri consumer;
  Timestamp start;
  Timestamp end;
  Seconds clock_step{1};
  std::vector<CatalogAsset> assets;
  std::vector<OfferSpec> offers;
  std::vector<ScriptEntry> script;
  std::optional<RegionHierarchy> regions;
};

/// Offers may be {"pattern", "params", "with"} or {"policy": "<file.ttl>"};
/// relative files resolve against `base_dir`. Throws ScenarioError.
Scenario scenario_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);
void validate_scenario(const Scenario& scenario);

/// Message between connectors. Bodies follow the script args of the same name.
struct Message {
  std::string type;
  Timestamp at;
  Iri sender;
  nlohmann::json body;
};

struct DecisionEntry {
  Timestamp at;
  std::string offer;
  Iri action;
  Outcome outcome = Outcome::NotApplicable;
  EnforcementAction enforcement = EnforcementAction::Block;
  std::string reason;
  std::optional<std::uint64_t> usage_id;
};

/// Provider side: catalog, negotiations, usage state and the audit trail.
/// Not thread safe; callers serialize access.
class ProviderConnector {
 public:
  explicit ProviderConnector(Iri id, std::optional<RegionHierarchy> regions = std::nullopt);

  void add_asset(CatalogAsset asset);
  void add_offer(OfferSpec offer);

  /// Returns a JSON reply; {"error": ...} on rejected messages.
  /// IllegalTransition propagates.
  nlohmann::json handle(const Message& message);
  /// Continuous monitoring of every agreement at `now`.
  void tick(Timestamp now);
  /// Detective check of every agreement.
  std::vector<std::pair<std::string, ObligationStatus>> obligations(Timestamp now) const;

  const Iri& id() const { return id_; }
  const AuditLog& log() const { return log_; }
  const UsageState& state() const { return state_; }
  const std::map<std::string, NegotiationState>& negotiations() const { return negotiations_; }
  const std::vector<DecisionEntry>& decisions() const { return decisions_; }
  const std::vector<RevocationEvent>& revocations() const { return revocations_; }
  const TransitionMonitor& monitor() const { return monitor_; }
  const std::vector<std::string>& skipped() const { return skipped_; }

 private:
  nlohmann::json on_negotiate(const Message& m);
  nlohmann::json on_request(const Message& m);
  nlohmann::json on_evidence(const Message& m);
  nlohmann::json on_release(const Message& m);
  nlohmann::json on_revoke(const Message& m);
  nlohmann::json on_set_attribute(const Message& m);
  const NegotiationState* negotiation_for(const nlohmann::json& body) const;
  Iri asset_for(const NegotiationState& neg) const;
  ProviderList providers() const;

  Iri id_;
  std::optional<RegionHierarchy> regions_;
  std::map<Iri, CatalogAsset> assets_;
  std::map<std::string, OfferSpec> offers_;
  std::map<std::string, NegotiationState> negotiations_;
  std::map<std::string, std::string> offer_of_;
  std::map<std::string, std::vector<OngoingUsage>> ongoing_;
  std::shared_ptr<StaticAttributeProvider> attributes_;
  UsageState state_;
  AuditLog log_;
  TransitionMonitor monitor_;
  std::vector<DecisionEntry> decisions_;
  std::vector<RevocationEvent> revocations_;
  std::vector<std::string> skipped_;
  std::uint64_t next_usage_ = 1;
};

struct RunResult {
  AuditLog log;
  /// (negotiation id, status)
  std::vector<std::pair<std::string, ObligationStatus>> obligations;
  std::vector<RevocationEvent> revocations;
  std::vector<NegotiationState> negotiations;
  std::vector<DecisionEntry> decisions;
  std::vector<std::string> skipped;
  std::vector<std::string> illegal_transitions;
  Timestamp end;
};

/// Deterministic replay on the logical clock. Throws ScenarioError.
RunResult run(const Scenario& scenario);

std::string report_json(const Scenario& scenario, const RunResult& result);
/// Writes report.json, audit.ndjson and agreements.ttl into `dir`.
void write_outputs(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir);

/// Blocking HTTP front end: POST /negotiate, /request, /evidence; GET /audit.
/// Request bodies are JSON with "at" and "consumer" beside the message fields.
void serve(ProviderConnector& connector, const std::string& host, int port);

}  // namespace dspolicy
