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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/pdp.hpp"

namespace dspolicy {

enum class AuditOutcome { Permitted, Denied, Delayed, Executed, DutyFulfilled, DutyViolated, Revoked, Notified };
std::string_view to_string(AuditOutcome outcome);
std::optional<AuditOutcome> audit_outcome_from_string(std::string_view text);

struct AuditRecord {
  std::uint64_t seq = 0;
  Timestamp at;
  Iri actor;
  Iri action;
  Iri target;
  AuditOutcome outcome = AuditOutcome::Executed;
  std::string detail;
  /// Agreement the record belongs to; empty when not tied to one.
  Iri agreement;
  /// Attributes attached to self-reported evidence, keyed by operand
  /// (full IRI or prefixed name), e.g. "dsp:storageRegion" → "AT".
  std::map<std::string, std::string> evidence;

  bool operator==(const AuditRecord&) const = default;
};

/// Append-only log; seq starts at 1 and increases by one per record.
class AuditLog {
 public:
  /// Assigns seq and returns the stored record.
  const AuditRecord& append(AuditRecord record);
  const std::vector<AuditRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  /// One JSON object per line.
  std::string to_ndjson() const;
  /// Throws std::invalid_argument on malformed lines or non-increasing seq.
  static AuditLog from_ndjson(std::string_view text);

 private:
  std::vector<AuditRecord> records_;
};

std::string record_to_json(const AuditRecord& record);

/// Consumer self-report of a performed action. Earlier-than-previous
/// timestamps are kept and flagged "out-of-order" in detail.
const AuditRecord& record_evidence(AuditLog& log, const Iri& actor, const Iri& action, const Iri& target, Timestamp at,
                                   std::map<std::string, std::string> evidence = {}, const Iri& agreement = {});

enum class DutyStatus { Pending, Fulfilled, Violated };
std::string_view to_string(DutyStatus status);

struct ObligationStatus {
  /// Duty with parties and target resolved.
  Rule duty;
  /// e.g. "rule[0].duty[1]" or "rule[2]".
  std::string path;
  DutyStatus status = DutyStatus::Pending;
  std::optional<Timestamp> deadline;
  std::optional<Timestamp> fulfilled_at;
  std::string detail;
};

std::string obligation_to_json(const ObligationStatus& status);

enum class EnforcementAction { Allow, Block, Delay };
std::string_view to_string(EnforcementAction action);

struct PepOptions {
  const RegionHierarchy* regions = nullptr;
  const ProfileRegistry* registry = &ProfileRegistry::builtin();
  bool revoked = false;
};

struct PepResult {
  EnforcementAction action = EnforcementAction::Block;
  AuditOutcome outcome = AuditOutcome::Denied;
  Decision decision;
  UsageState state;
  /// Duties registered Pending on Permit.
  std::vector<ObligationStatus> pending;
  /// Unfulfilled preconditions on Delay.
  std::vector<Rule> waiting_on;
};

/// Intercepts a request: evaluates, commits on Permit and writes the audit trail.
PepResult pep_handle(const AccessRequest& req, const Policy& agreement, const UsageState& state,
                     const ProviderList& pip, AuditLog& log, const PepOptions& options = {});

struct DetectiveOptions {
  const ProfileRegistry* registry = &ProfileRegistry::builtin();
  const RegionHierarchy* regions = nullptr;
  /// Start of up-to-dateness windows; defaults to the agreement's first record.
  std::optional<Timestamp> window_start;
  /// When false, periodic duties that have shown no gap stay Pending.
  bool window_closed = true;
};

/// Status of every activated duty. Nested duties activate on a Permitted
/// record for their permission; top-level duties are always active.
std::vector<ObligationStatus> detective_check(const Policy& agreement, const AuditLog& log, Timestamp now,
                                              const DetectiveOptions& options = {});

/// True when `record` is evidence that fulfils `duty` (duty already resolved).
bool evidence_satisfies(const Rule& duty, const AuditRecord& record, const DetectiveOptions& options = {});
/// True when `record` is evidence about `duty` that contradicts it.
bool evidence_contradicts(const Rule& duty, const AuditRecord& record, const DetectiveOptions& options = {});

struct Window {
  Timestamp start;
  Timestamp end;
};

/// Fulfilled iff every gap between consecutive events and the window edges is
/// at most `interval`. Events outside the window are ignored.
ObligationStatus check_up_to_dateness(const std::vector<Timestamp>& update_events, Seconds interval, Window window);

struct OngoingUsage {
  std::uint64_t id = 0;
  AccessRequest request;
  UsageKey key;
  Timestamp started;
  bool connection = false;
  bool notified = false;
};

struct RevocationEvent {
  std::uint64_t usage_id = 0;
  Iri actor;
  Iri target;
  Timestamp at;
  std::string reason;
};

struct MonitorOptions {
  const RegionHierarchy* regions = nullptr;
  const ProfileRegistry* registry = &ProfileRegistry::builtin();
};

/// Re-checks the non-consumptive constraints of each ongoing usage at `now`
/// and the concurrent-connection bound. Revoked usages are removed from
/// `usages` and logged; usages under an inform duty are notified once.
std::vector<RevocationEvent> continuous_monitor_step(std::vector<OngoingUsage>& usages, const Policy& agreement,
                                                     const UsageState& state, const ProviderList& pip, Timestamp now,
                                                     AuditLog& log, const MonitorOptions& options = {});

}  // namespace dspolicy
