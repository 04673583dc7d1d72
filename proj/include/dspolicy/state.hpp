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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dspolicy/chrono.hpp"
#include "dspolicy/vocab.hpp"

namespace dspolicy {

struct UsageKey {
  Iri agreement;
  Iri assignee;
  Iri action;

  auto operator<=>(const UsageKey&) const = default;
  bool operator==(const UsageKey&) const = default;
};

struct UsageCounters {
  std::uint64_t executed_count = 0;
  std::vector<Timestamp> exercise_log;
  std::uint64_t active_connections = 0;

  bool operator==(const UsageCounters&) const = default;
};

struct Credit {
  Decimal balance;
  Iri currency;

  bool operator==(const Credit&) const = default;
};

/// Stateful counters per agreement. Value type: commit produces a new state.
struct UsageState {
  std::map<UsageKey, UsageCounters> usage;
  /// Keyed by (agreement uid, assignee).
  std::map<std::pair<Iri, Iri>, Credit> credit;

  /// Counters for `key`; a shared empty instance when absent.
  const UsageCounters& counters(const UsageKey& key) const;
  std::optional<Credit> credit_for(const Iri& agreement, const Iri& assignee) const;

  bool operator==(const UsageState&) const = default;
};

/// JSON form:
/// {"usage":[{"agreement","assignee","action","executed_count","exercise_log":[...],
///   "active_connections"}], "credit":[{"agreement","assignee","balance","currency"}]}
std::string state_to_json(const UsageState& state);
/// Throws std::invalid_argument on malformed input.
UsageState state_from_json(std::string_view text);

}  // namespace dspolicy
