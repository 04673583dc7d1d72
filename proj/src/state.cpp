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

#include "dspolicy/state.hpp"

#include <stdexcept>

#include "json.hpp"

namespace dspolicy {

using nlohmann::json;

const UsageCounters& UsageState::counters(const UsageKey& key) const {
  static const UsageCounters kEmpty;
  auto it = usage.find(key);
  return it == usage.end() ? kEmpty : it->second;
}

std::optional<Credit> UsageState::credit_for(const Iri& agreement, const Iri& assignee) const {
  auto it = credit.find({agreement, assignee});
  if (it == credit.end()) return std::nullopt;
  return it->second;
}

std::string state_to_json(const UsageState& state) {
  json usage = json::array();
  for (const auto& [key, c] : state.usage) {
    json log = json::array();
    for (auto t : c.exercise_log) log.push_back(format_datetime(t));
    usage.push_back({{"agreement", key.agreement.value},
                     {"assignee", key.assignee.value},
                     {"action", key.action.value},
                     {"executed_count", c.executed_count},
                     {"exercise_log", log},
                     {"active_connections", c.active_connections}});
  }
  json credit = json::array();
  for (const auto& [key, c] : state.credit) {
    credit.push_back({{"agreement", key.first.value},
                      {"assignee", key.second.value},
                      {"balance", c.balance.to_string()},
                      {"currency", c.currency.value}});
  }
  return json{{"usage", usage}, {"credit", credit}}.dump(2);
}

namespace {

Timestamp need_time(const json& j) {
  auto t = parse_datetime(j.get<std::string>());
  if (!t) throw std::invalid_argument("bad timestamp " + j.dump());
  return *t;
}

}  // namespace

UsageState state_from_json(std::string_view text) {
  UsageState state;
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw std::invalid_argument("usage state must be a JSON object");
    for (const auto& u : doc.value("usage", json::array())) {
      UsageKey key{Iri(u.at("agreement").get<std::string>()), Iri(u.at("assignee").get<std::string>()),
                   Iri(u.at("action").get<std::string>())};
      UsageCounters c;
      for (const auto& t : u.value("exercise_log", json::array())) c.exercise_log.push_back(need_time(t));
      c.executed_count = u.value("executed_count", static_cast<std::uint64_t>(c.exercise_log.size()));
      if (c.executed_count != c.exercise_log.size()) {
        throw std::invalid_argument("executed_count does not match exercise_log length");
      }
      c.active_connections = u.value("active_connections", std::uint64_t{0});
      state.usage[key] = std::move(c);
    }
    for (const auto& c : doc.value("credit", json::array())) {
      json bal = c.at("balance");
      auto d = Decimal::parse(bal.is_string() ? bal.get<std::string>() : bal.dump());
      if (!d) throw std::invalid_argument("bad credit balance " + bal.dump());
      state.credit[{Iri(c.at("agreement").get<std::string>()), Iri(c.at("assignee").get<std::string>())}] =
          Credit{*d, Iri(c.value("currency", std::string()))};
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("usage state: ") + e.what());
  }
  return state;
}

}  // namespace dspolicy
