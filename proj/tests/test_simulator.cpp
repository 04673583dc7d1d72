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

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dspolicy/patterns.hpp"
#include "dspolicy/simulator.hpp"
#include "dspolicy/textio.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace dspolicy;
using json = nlohmann::json;

namespace {

const Iri kTc("https://transconnect.example/connector");
const Iri kTi("https://trafficinsights.example/connector");
const Iri kFeed("https://transconnect.example/assets/live-feed");

Scenario scenario_file(const std::string& name) { return load_scenario(testing::data_path("scenarios/" + name)); }

Policy offer_for(const std::string& pattern, Params extra) {
  Params p = {{"assigner", kTc.value}, {"target", kFeed.value}};
  for (const auto& [k, v] : extra.items()) p[k] = v;
  return instantiate(pattern, p);
}

Timestamp at(const std::string& text) { return *parse_datetime(text); }

// oracle: offer rules with the assignee written in by hand
std::vector<Rule> bound_rules(const Policy& offer, const Iri& consumer) {
  std::vector<Rule> out = offer.rules;
  for (auto& r : out) {
    if (!r.assignee.has_value()) r.assignee = consumer;
  }
  return out;
}

size_t count_outcome(const AuditLog& log, AuditOutcome o) {
  return std::count_if(log.records().begin(), log.records().end(),
                       [&](const AuditRecord& r) { return r.outcome == o; });
}

std::vector<DutyStatus> statuses(const RunResult& r) {
  std::vector<DutyStatus> out;
  for (const auto& [n, s] : r.obligations) out.push_back(s.status);
  return out;
}

const ObligationStatus& obligation(const RunResult& r, const Iri& action) {
  for (const auto& [n, s] : r.obligations) {
    if (s.duty.action.action == action) return s;
  }
  throw std::runtime_error("no obligation for " + action.value);
}

Scenario feed_scenario(const Policy& offer) {
  Scenario s;
  s.name = "feed";
  s.provider = kTc;
  s.consumer = kTi;
  s.start = at("2023-07-01T00:00:00Z");
  s.end = at("2023-07-01T01:00:00Z");
  s.clock_step = Seconds(10);
  s.assets.push_back({kFeed, "feed", ""});
  s.offers.push_back({"feed", kFeed, offer});
  s.script.push_back({s.start, "negotiate", {{"offer", "feed"}}});
  return s;
}

}  // namespace

TEST_CASE("accepted offer becomes an agreement with the assignee bound") {
  Policy offer = offer_for("access-count", {{"max_count", 3}, {"with", {{{"pattern", "deletion"}, {"deadline", "2023-07-10T00:00:00Z"}}}}});
  NegotiationState n = negotiate(offer, kTi);
  CHECK(n.phase == Phase::Agreed);
  REQUIRE(n.agreement);
  CHECK(n.agreement->kind == PolicyKind::Agreement);
  CHECK(n.agreement->uid != offer.uid);
  CHECK(rules_equal(n.agreement->rules, bound_rules(offer, kTi)));
  CHECK_FALSE(rules_equal(n.agreement->rules, offer.rules));
  CHECK(validate_policy(*n.agreement, ProfileRegistry::builtin()).empty());

  // an assignee already present is kept
  Policy owned = offer_for("access-count", {{"max_count", 3}, {"assignee", "https://other.example/c"}});
  CHECK(negotiate(owned, kTi).agreement->rules.front().assignee == Iri("https://other.example/c"));
}

TEST_CASE("declines and guards") {
  Policy offer = offer_for("allow-access", {});
  NegotiationState d = negotiate(offer, kTi, false);
  CHECK(d.phase == Phase::Declined);
  CHECK_FALSE(d.agreement);
  CHECK(d.reason == "declined by consumer");

  Policy set = offer;
  set.kind = PolicyKind::Set;
  NegotiationState bad = negotiate(set, kTi);
  CHECK(bad.phase == Phase::Declined);
  CHECK(bad.reason.find("offer kind") != std::string::npos);

  Policy broken = offer;
  broken.rules.clear();
  CHECK(negotiate(broken, kTi).phase == Phase::Declined);

  NegotiationState agreed = negotiate(offer, kTi);
  CHECK_THROWS_WITH_AS(negotiate(agreed, kTi, true), doctest::Contains("illegal transition"), IllegalTransition);
  NegotiationState revoked = revoke(agreed);
  CHECK(revoked.phase == Phase::Revoked);
  CHECK(revoked.agreement);
  CHECK_THROWS_AS(revoke(revoked), IllegalTransition);
  CHECK_THROWS_AS(revoke(d), IllegalTransition);
}

TEST_CASE("random action sequences never make an illegal transition") {
  testing::PolicyGenerator gen(77);
  Policy offer = offer_for("allow-access", {});
  size_t rejected = 0;
  for (int trial = 0; trial < 500; ++trial) {
    TransitionMonitor monitor;
    NegotiationState s = open_negotiation("n" + std::to_string(trial), offer);
    // reference machine
    Phase ref = Phase::Offered;
    for (int step = 0; step < 8; ++step) {
      int op = gen.uniform(0, 2);
      try {
        if (op == 2) {
          s = revoke(s, &monitor);
        } else {
          s = negotiate(s, kTi, op == 0, ProfileRegistry::builtin(), &monitor);
        }
      } catch (const IllegalTransition&) {
        ++rejected;
      }
      if (op == 2 && ref == Phase::Agreed) ref = Phase::Revoked;
      if (op != 2 && ref == Phase::Offered) ref = op == 0 ? Phase::Agreed : Phase::Declined;
      CHECK(s.phase == ref);
      CHECK(s.agreement.has_value() == (ref == Phase::Agreed || ref == Phase::Revoked));
    }
    CHECK(monitor.illegal().empty());
    CHECK(monitor.observed() > 0);
  }
  CHECK(rejected > 0);
}

TEST_CASE("monitor flags illegal transitions it is shown") {
  TransitionMonitor m;
  m.observe("x", Phase::Offered, Phase::Requested);
  m.observe("x", Phase::Declined, Phase::Agreed);
  CHECK(m.observed() == 2);
  REQUIRE(m.illegal().size() == 1);
  CHECK(m.illegal()[0] == "x: Declined -> Agreed");
}

TEST_CASE("scenario validation happens before execution") {
  json base = json::parse(testing::read_fixture("scenarios/rate-limit.json"));
  auto load = [](const json& j) { return scenario_from_json(j.dump()); };
  CHECK_NOTHROW(load(base));

  json unknown_asset = base;
  unknown_asset["script"][1]["args"]["target"] = "https://transconnect.example/assets/missing";
  CHECK_THROWS_WITH_AS(load(unknown_asset), doctest::Contains("unknown asset"), ScenarioError);

  json offer_asset = base;
  offer_asset["offers"][0]["asset"] = "https://nowhere.example/x";
  CHECK_THROWS_WITH_AS(load(offer_asset), doctest::Contains("unknown asset"), ScenarioError);

  json backwards = base;
  backwards["script"][2]["at"] = "2023-07-01T00:00:30Z";
  CHECK_THROWS_WITH_AS(load(backwards), doctest::Contains("must not decrease"), ScenarioError);

  json verb = base;
  verb["script"][1]["action"] = "steal";
  CHECK_THROWS_WITH_AS(load(verb), doctest::Contains("unknown action"), ScenarioError);

  json no_neg = base;
  no_neg["script"][1]["args"]["offer"] = "other";
  CHECK_THROWS_AS(load(no_neg), ScenarioError);

  json bad_pattern = base;
  bad_pattern["offers"][0]["params"].erase("max_count");
  CHECK_THROWS_WITH_AS(load(bad_pattern), doctest::Contains("max_count"), ScenarioError);

  CHECK_THROWS_AS(scenario_from_json("{"), ScenarioError);

  Scenario s = load(base);
  s.script.push_back({s.end + Seconds(1), "request", {{"offer", "feed"}}});
  CHECK_THROWS_AS(run(s), ScenarioError);
}

TEST_CASE("TransConnect demo with a compliant consumer") {
  Scenario s = scenario_file("transconnect-demo.json");
  RunResult r = run(s);
  REQUIRE(r.negotiations.size() == 1);
  CHECK(r.negotiations[0].phase == Phase::Agreed);
  CHECK(r.decisions.size() == 4);
  for (const auto& d : r.decisions) CHECK(d.outcome == Outcome::Permit);
  CHECK(count_outcome(r.log, AuditOutcome::Permitted) == 4);
  CHECK(r.revocations.empty());
  CHECK_FALSE(r.obligations.empty());
  for (auto st : statuses(r)) CHECK(st == DutyStatus::Fulfilled);
  CHECK(r.illegal_transitions.empty());
}

TEST_CASE("runs are byte-for-byte deterministic") {
  for (const char* name : {"transconnect-demo.json", "listing1-violating.json", "rate-limit.json"}) {
    CAPTURE(name);
    Scenario s = scenario_file(name);
    RunResult a = run(s);
    RunResult b = run(scenario_file(name));
    CHECK(a.log.to_ndjson() == b.log.to_ndjson());
    CHECK(report_json(s, a) == report_json(s, b));
  }
}

TEST_CASE("Listing 1 scenarios") {
  RunResult ok = run(scenario_file("listing1-compliant.json"));
  CHECK(obligation(ok, odrl("delete")).status == DutyStatus::Fulfilled);
  CHECK(obligation(ok, odrl("anonymize")).status == DutyStatus::Fulfilled);
  CHECK(ok.skipped.empty());

  RunResult bad = run(scenario_file("listing1-violating.json"));
  CHECK(obligation(bad, odrl("delete")).status == DutyStatus::Violated);
  CHECK(obligation(bad, odrl("anonymize")).status == DutyStatus::Pending);
  CHECK(bad.skipped.size() == 2);
  CHECK(count_outcome(bad.log, AuditOutcome::Permitted) == count_outcome(ok.log, AuditOutcome::Permitted));
}

TEST_CASE("rate-limit scenario follows the sliding-window oracle") {
  Scenario s = scenario_file("rate-limit.json");
  RunResult r = run(s);
  REQUIRE(r.decisions.size() == 19);
  std::deque<Timestamp> granted;
  size_t permits = 0;
  for (const auto& d : r.decisions) {
    while (!granted.empty() && granted.front() <= d.at - Seconds(60)) granted.pop_front();
    bool expect = granted.size() + 1 <= 2;
    if (expect) granted.push_back(d.at);
    CAPTURE(format_datetime(d.at));
    CHECK((d.outcome == Outcome::Permit) == expect);
    permits += expect;
  }
  CHECK(permits == 7);
}

TEST_CASE("permitted records never exceed the access bound") {
  testing::PolicyGenerator gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    int bound = gen.uniform(0, 6);
    Scenario s = feed_scenario(offer_for("access-count", {{"max_count", bound}}));
    int requests = gen.uniform(0, 12);
    Timestamp t = s.start;
    for (int i = 0; i < requests; ++i) {
      t += Seconds(gen.uniform(0, 200));
      s.script.push_back({t, "request", {{"offer", "feed"}, {"action", "odrl:read"}}});
    }
    RunResult r = run(s);
    CHECK(count_outcome(r.log, AuditOutcome::Permitted) == static_cast<size_t>(std::min(bound, requests)));
  }
}

TEST_CASE("connections are revoked by the monitor and released on request") {
  Policy offer = offer_for("concurrent-connections",
                           {{"max_connections", 1},
                            {"with", {{{"pattern", "time-restriction"},
                                       {"start", "2023-07-01T00:00:00Z"},
                                       {"end", "2023-07-01T00:10:00Z"}}}}});
  Scenario s = feed_scenario(offer);
  s.script.push_back({at("2023-07-01T00:01:00Z"), "request", {{"offer", "feed"}, {"hold", true}}});
  s.script.push_back({at("2023-07-01T00:02:00Z"), "request", {{"offer", "feed"}}});
  s.script.push_back({at("2023-07-01T00:03:00Z"), "release", {{"usage", 1}}});
  s.script.push_back({at("2023-07-01T00:04:00Z"), "request", {{"offer", "feed"}}});
  RunResult r = run(s);
  REQUIRE(r.decisions.size() == 3);
  CHECK(r.decisions[0].outcome == Outcome::Permit);
  CHECK(r.decisions[1].outcome == Outcome::Deny);
  CHECK(r.decisions[2].outcome == Outcome::Permit);
  // the third connection outlives the time window
  REQUIRE(r.revocations.size() == 1);
  CHECK(r.revocations[0].usage_id == 2);
  CHECK(r.revocations[0].at > at("2023-07-01T00:10:00Z"));
  CHECK(count_outcome(r.log, AuditOutcome::Revoked) == 1);
}

TEST_CASE("revoking an agreement blocks later requests") {
  Scenario s = feed_scenario(offer_for("allow-access", {}));
  s.script.push_back({at("2023-07-01T00:01:00Z"), "request", {{"offer", "feed"}, {"hold", true}}});
  s.script.push_back({at("2023-07-01T00:02:00Z"), "revoke", {{"offer", "feed"}}});
  s.script.push_back({at("2023-07-01T00:03:00Z"), "request", {{"offer", "feed"}}});
  RunResult r = run(s);
  CHECK(r.negotiations[0].phase == Phase::Revoked);
  REQUIRE(r.decisions.size() == 2);
  CHECK(r.decisions[0].enforcement == EnforcementAction::Allow);
  CHECK(r.decisions[1].enforcement == EnforcementAction::Block);
  CHECK(r.revocations.size() == 1);
  CHECK(count_outcome(r.log, AuditOutcome::Revoked) == 2);
  CHECK(r.illegal_transitions.empty());
}

TEST_CASE("attributes set during the run reach the PIP") {
  Scenario s = feed_scenario(offer_for("location-access", {{"region", "EU"}}));
  s.regions = RegionHierarchy::from_json(testing::read_fixture("regions.json"));
  s.script.push_back({at("2023-07-01T00:01:00Z"), "request", {{"offer", "feed"}}});
  s.script.push_back({at("2023-07-01T00:02:00Z"), "set-attribute", {{"operand", "odrl:spatial"}, {"value", "AT-9"}}});
  s.script.push_back({at("2023-07-01T00:03:00Z"), "request", {{"offer", "feed"}}});
  s.script.push_back({at("2023-07-01T00:04:00Z"), "set-attribute", {{"operand", "odrl:spatial"}, {"value", "US"}}});
  s.script.push_back({at("2023-07-01T00:05:00Z"), "request", {{"offer", "feed"}}});
  RunResult r = run(s);
  REQUIRE(r.decisions.size() == 3);
  CHECK(r.decisions[0].outcome == Outcome::Deny);
  CHECK(r.decisions[0].reason == "undetermined");
  CHECK(r.decisions[1].outcome == Outcome::Permit);
  CHECK(r.decisions[2].outcome == Outcome::Deny);
}

TEST_CASE("requests without an agreement are blocked and audited") {
  Scenario s = feed_scenario(offer_for("allow-access", {}));
  s.script[0].args["accept"] = false;
  s.script.push_back({at("2023-07-01T00:01:00Z"), "request", {{"offer", "feed"}}});
  RunResult r = run(s);
  CHECK(r.negotiations[0].phase == Phase::Declined);
  REQUIRE(r.decisions.size() == 1);
  CHECK(r.decisions[0].reason == "no agreement");
  CHECK(count_outcome(r.log, AuditOutcome::Denied) == 1);
}

TEST_CASE("connector messages") {
  ProviderConnector p(kTc);
  p.add_asset({kFeed, "feed", ""});
  p.add_offer({"feed", kFeed, offer_for("allow-access", {})});
  Timestamp t = at("2023-07-01T00:00:00Z");
  CHECK(p.handle({"teleport", t, kTi, json::object()}).contains("error"));
  CHECK(p.handle({"negotiate", t, kTi, {{"offer", "nope"}}}).contains("error"));
  json agreed = p.handle({"negotiate", t, kTi, {{"offer", "feed"}}});
  CHECK(agreed["phase"] == "Agreed");
  CHECK_THROWS_AS(p.handle({"negotiate", t, kTi, {{"offer", "feed"}}}), IllegalTransition);
  json permit = p.handle({"request", t, kTi, {{"offer", "feed"}, {"action", "odrl:read"}}});
  CHECK(permit["outcome"] == "Permit");
  CHECK(p.handle({"evidence", t, kTi, {{"offer", "feed"}}}).contains("error"));
  CHECK(p.handle({"release", t, kTi, {{"usage", 9}}}).contains("error"));
  json ev = p.handle({"evidence", t, kTi, {{"offer", "feed"}, {"action", "odrl:delete"}, {"evidence", {{"outcome", "pass"}}}}});
  CHECK(ev["seq"] == p.log().size());
  CHECK(p.log().records().back().target == kFeed);
  CHECK(p.log().records().back().evidence.at("outcome") == "pass");
}

TEST_CASE("outputs are written") {
  Scenario s = scenario_file("listing1-violating.json");
  RunResult r = run(s);
  auto dir = std::filesystem::temp_directory_path() / "dspolicy-sim-test";
  std::filesystem::remove_all(dir);
  write_outputs(s, r, dir);
  std::ifstream audit(dir / "audit.ndjson");
  std::stringstream ss;
  ss << audit.rdbuf();
  CHECK(AuditLog::from_ndjson(ss.str()).records() == r.log.records());
  std::ifstream ttl(dir / "agreements.ttl");
  std::stringstream tt;
  tt << ttl.rdbuf();
  auto agreements = parse(tt.str());
  REQUIRE(agreements.size() == 1);
  CHECK(semantic_equals(agreements[0], *r.negotiations[0].agreement));
  std::ifstream rep(dir / "report.json");
  json report = json::parse(rep);
  CHECK(report["obligations"].size() == 2);
  CHECK(report["audit_records"] == r.log.size());
  std::filesystem::remove_all(dir);
}
