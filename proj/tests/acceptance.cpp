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
#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "dspolicy/diag.hpp"
#include "dspolicy/enforcement.hpp"
#include "dspolicy/patterns.hpp"
#include "dspolicy/simulator.hpp"
#include "dspolicy/textio.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "json.hpp"

using namespace dspolicy;
using json = nlohmann::json;
using testing::kConsumer;
using testing::kFile1;
using testing::kProvider;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

const Timestamp kT0 = *parse_datetime("2023-07-01T00:00:00Z");

Policy as_agreement(Policy p) {
  p.kind = PolicyKind::Agreement;
  return p;
}

Params base_params() {
  return {{"assigner", kProvider.value}, {"assignee", kConsumer.value}, {"target", kFile1.value}};
}

AccessRequest read_at(Timestamp t, const Iri& who = kConsumer) {
  AccessRequest r;
  r.requester = who;
  r.target = kFile1;
  r.action = odrl("read");
  r.timestamp = t;
  return r;
}

// 1
void corpus_round_trip() {
  std::string l2 = testing::read_fixture("listing2.ttl");
  l2 = std::string(prefix_block()) + l2.substr(l2.find("<http://example.com/policies"));
  const std::pair<const char*, std::string> corpus[] = {{"listing1.ttl", testing::read_fixture("listing1.ttl")},
                                                        {"listing2.ttl", l2}};
  for (const auto& [f, text] : corpus) {
    Policy original = parse(text).at(0);
    Policy once = parse(serialize(original)).at(0);
    expect(semantic_equals(original, once), std::string(f) + ": first round trip differs");
    Policy twice = parse(serialize(once)).at(0);
    expect(semantic_equals(original, twice), std::string(f) + ": second round trip differs");
    expect(serialize(once) == serialize(twice), std::string(f) + ": canonical form not stable");
  }
}

// 2
void table_fidelity() {
  std::ostringstream out, err;
  int code = cli::run_cli({"patterns", "list"}, out, err);
  expect(code == 0, "patterns list exit " + std::to_string(code));
  json golden = json::parse(testing::read_fixture("table1.json"));
  std::istringstream lines(out.str());
  std::vector<std::vector<std::string>> rows;
  for (std::string l; std::getline(lines, l);) {
    std::vector<std::string> cells;
    std::istringstream cs(l);
    for (std::string c; std::getline(cs, c, '\t');) cells.push_back(c);
    rows.push_back(cells);
  }
  expect(rows.size() == 22 && golden.size() == 22, "expected 22 descriptors, got " + std::to_string(rows.size()));
  std::set<std::string> self_defined;
  for (size_t i = 0; i < rows.size(); ++i) {
    const json& g = golden[i];
    std::string pip;
    for (const auto& p : g["pip"]) pip += (pip.empty() ? "" : ",") + p.get<std::string>();
    std::vector<std::string> want{g["id"], pip, g["pap_pdp"], g["enforcement"], g["source"]};
    expect(rows[i] == want, "row " + std::to_string(i) + " (" + g["id"].get<std::string>() + ") differs");
    if (rows[i][4] == "SelfDefined") self_defined.insert(rows[i][0]);
  }
  expect(self_defined == std::set<std::string>{"data-quality", "encryption-by-provider", "up-to-dateness"},
         "self-defined set differs");
}

// 3
void listing1_semantics() {
  Policy a = testing::listing1_agreement();
  UsageState s;
  for (int i = 1; i <= 1025; ++i) {
    AccessRequest r = read_at(kT0 + Seconds(i));
    Decision d = evaluate_request(a, r, s, {});
    if (i <= 1024) {
      expect(d.outcome == Outcome::Permit, "execution " + std::to_string(i) + " not permitted: " + d.reason);
      s = commit_usage(d, r, s);
    } else {
      expect(d.outcome == Outcome::Deny, "execution 1025 not denied");
    }
  }
  Decision other = evaluate_request(a, read_at(kT0, Iri("https://www.example.com/someone-else")), {}, {});
  expect(other.outcome == Outcome::NotApplicable, "non-assignee got " + std::string(to_string(other.outcome)));
}

// 4
DutyStatus status_of(const RunResult& r, const Iri& action) {
  for (const auto& [n, s] : r.obligations) {
    if (s.duty.action.action == action) return s.status;
  }
  throw Failure("no obligation for " + action.value);
}

void listing1_detective() {
  RunResult ok = run(load_scenario(testing::data_path("scenarios/listing1-compliant.json")));
  expect(status_of(ok, odrl("delete")) == DutyStatus::Fulfilled, "reported deletion not Fulfilled");
  expect(status_of(ok, odrl("anonymize")) == DutyStatus::Fulfilled, "reported anonymization not Fulfilled");
  Scenario missing = load_scenario(testing::data_path("scenarios/listing1-violating.json"));
  expect(missing.end == *parse_datetime("2023-07-11T00:00:00Z"), "violating scenario must end 2023-07-11");
  RunResult bad = run(missing);
  expect(status_of(bad, odrl("delete")) == DutyStatus::Violated, "missing deletion not Violated");
  expect(status_of(bad, odrl("anonymize")) != DutyStatus::Fulfilled, "anonymization fulfilled without evidence");
}

// 5
DutyStatus update_status(const std::vector<int>& offsets) {
  Policy l2 = parse(testing::read_fixture("listing2.ttl")).at(0);
  AuditLog log;
  for (int off : offsets) record_evidence(log, kProvider, dsp("update"), kFile1, kT0 + Seconds(off));
  DetectiveOptions opts;
  opts.window_start = kT0;
  for (const auto& s : detective_check(l2, log, kT0 + Seconds(300), opts)) {
    if (s.duty.action.action == dsp("update")) return s.status;
  }
  throw Failure("no update obligation");
}

void listing2_semantics() {
  std::vector<int> regular;
  for (int t = 0; t <= 300; t += 30) regular.push_back(t);
  expect(update_status(regular) == DutyStatus::Fulfilled, "30 s updates not Fulfilled");
  // one 45 s gap, 120 → 165
  const std::vector<int> gap{0, 30, 60, 90, 120, 165, 195, 225, 255, 285, 300};
  expect(update_status(gap) == DutyStatus::Violated, "45 s gap not Violated");

  auto checker = MinimalShapeChecker::from_turtle(testing::read_fixture("shapes/record-shape.ttl"));
  ConformanceRegistry reg;
  checker->register_all(reg);
  Iri shape("http://example.com/shacl-shape");
  expect(check_conformance(testing::read_fixture("records/conformant.json"), shape, reg), "conformant record rejected");
  expect(!check_conformance(testing::read_fixture("records/nonconformant.json"), shape, reg),
         "non-conformant record accepted");
}

// 6
void oracle_equivalence() {
  std::mt19937 rng(60601);
  int mismatches = 0, sequences = 0;
  for (; sequences < 1000; ++sequences) {
    int n = std::uniform_int_distribution<int>(1, 10)(rng);
    int w = std::uniform_int_distribution<int>(10, 120)(rng);
    bool rate = sequences % 2 == 1;
    Params p = base_params();
    p["max_count"] = n;
    if (rate) p["window"] = "PT" + std::to_string(w) + "S";
    Policy a = as_agreement(instantiate(rate ? "rate-limit" : "access-count", p));
    UsageState s;
    std::vector<Timestamp> granted;
    Timestamp t = kT0 + Seconds(rng() % 100000);
    int len = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int i = 0; i < len; ++i) {
      t += Seconds(std::uniform_int_distribution<int>(0, 2 * w)(rng));
      AccessRequest r = read_at(t);
      Decision d = evaluate_request(a, r, s, {});
      int in_scope = 0;
      for (Timestamp g : granted) in_scope += !rate || g > t - Seconds(w);
      bool want = in_scope + 1 <= n;
      if (want) granted.push_back(t);
      if ((d.outcome == Outcome::Permit) != want) ++mismatches;
      if (d.outcome == Outcome::Permit) s = commit_usage(d, r, s);
    }
  }
  expect(mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(sequences) + " sequences");
}

// 7
Rule rule_of(RuleKind kind, const Iri& action, std::vector<Constraint> cs) {
  Rule r;
  r.kind = kind;
  r.target = kFile1;
  r.assigner = kProvider;
  r.assignee = kConsumer;
  r.action = ActionExpression(action);
  r.constraints = std::move(cs);
  return r;
}

Policy agreement_of(std::vector<Rule> rules) {
  Policy p;
  p.uid = Iri("http://example.com/agreements#acceptance");
  p.kind = PolicyKind::Agreement;
  p.profiles = {odrl_core_profile()};
  p.rules = std::move(rules);
  return p;
}

void purity_and_fail_closed() {
  std::mt19937 rng(707);
  // evaluate without commit is invisible
  for (int trial = 0; trial < 500; ++trial) {
    Params p = base_params();
    p["max_count"] = 1 + static_cast<int>(rng() % 6);
    if (rng() % 2) p["window"] = "PT" + std::to_string(10 + rng() % 60) + "S";
    Policy a = as_agreement(instantiate(p.contains("window") ? "rate-limit" : "access-count", p));
    UsageState quiet, noisy;
    Timestamp t = kT0;
    for (int i = 0; i < 12; ++i) {
      t += Seconds(rng() % 25);
      for (unsigned k = rng() % 3; k > 0; --k) (void)evaluate_request(a, read_at(t + Seconds(rng() % 90)), noisy, {});
      AccessRequest r = read_at(t);
      Decision d1 = evaluate_request(a, r, quiet, {});
      Decision d2 = evaluate_request(a, r, noisy, {});
      expect(d1.outcome == d2.outcome, "uncommitted evaluation changed a later decision");
      if (d1.outcome == Outcome::Permit) {
        quiet = commit_usage(d1, r, quiet);
        noisy = commit_usage(d2, r, noisy);
      }
    }
  }

  auto regions = RegionHierarchy::from_json(testing::read_fixture("regions.json"));
  const char* codes[] = {"EU", "AT", "DE", "US", "ZZ"};
  auto random_constraints = [&]() {
    std::vector<Constraint> cs;
    if (rng() % 2) cs.push_back(Constraint(odrl("spatial"), Operator::IsPartOf, plain_literal(codes[rng() % 5])));
    if (rng() % 3 == 0) cs.push_back(Constraint(odrl("purpose"), Operator::Eq, Iri("http://example.com/purpose/research")));
    if (rng() % 2) {
      cs.push_back(Constraint(odrl("dateTime"), rng() % 2 ? Operator::Lt : Operator::Gteq,
                              TypedLiteral{format_datetime(kT0 + Seconds(rng() % 200)), xsd("dateTime")}));
    }
    return cs;
  };

  // Undetermined blocks
  int undetermined = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto loc = std::make_shared<StaticAttributeProvider>();
    if (rng() % 2) loc->set(kConsumer, odrl("spatial"), plain_literal(codes[rng() % 4]));
    ProviderList pip{loc};
    Policy a = agreement_of({rule_of(RuleKind::Permission, odrl("use"), random_constraints())});
    AuditLog log;
    PepOptions opts;
    opts.regions = &regions;
    PepResult res = pep_handle(read_at(kT0 + Seconds(100)), a, {}, pip, log, opts);
    bool any = std::any_of(res.decision.trace.begin(), res.decision.trace.end(),
                           [](const TraceEntry& e) { return e.verdict.status == VerdictStatus::Undetermined; });
    if (any) {
      ++undetermined;
      expect(res.action == EnforcementAction::Block, "undetermined request was not blocked");
      expect(res.decision.outcome == Outcome::Deny, "undetermined request not denied");
    }
  }
  expect(undetermined > 50, "too few undetermined cases generated");

  // deny overrides
  int overridden = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto loc = std::make_shared<StaticAttributeProvider>();
    loc->set(kConsumer, odrl("spatial"), plain_literal("AT"));
    loc->set(kConsumer, odrl("purpose"), TypedLiteral{"http://example.com/purpose/research", xsd("anyURI")});
    ProviderList pip{loc};
    std::vector<Rule> rules;
    std::vector<Rule> prohibitions;
    for (int i = 1 + rng() % 2; i > 0; --i) rules.push_back(rule_of(RuleKind::Permission, odrl("use"), random_constraints()));
    for (int i = 1 + rng() % 2; i > 0; --i) {
      prohibitions.push_back(rule_of(RuleKind::Prohibition, rng() % 2 ? odrl("use") : odrl("read"), random_constraints()));
    }
    rules.insert(rules.end(), prohibitions.begin(), prohibitions.end());
    std::shuffle(rules.begin(), rules.end(), rng);
    Policy a = agreement_of(rules);
    AccessRequest r = read_at(kT0 + Seconds(100));
    Decision d = evaluate_request(a, r, {}, pip, {&regions});
    // oracle
    bool prohibited = false;
    for (const auto& pr : prohibitions) {
      bool all = true;
      for (const auto& c : pr.constraints) {
        if (c.left_operand == odrl("spatial")) {
          std::string code = std::get<TypedLiteral>(c.right_operand).lexical;
          all = all && (code == "AT" || code == "EU");
        } else if (c.left_operand == odrl("dateTime")) {
          Timestamp bound = *parse_datetime(std::get<TypedLiteral>(c.right_operand).lexical);
          all = all && (c.kind() == Operator::Lt ? r.timestamp < bound : r.timestamp >= bound);
        }
      }
      prohibited = prohibited || all;
    }
    if (prohibited) {
      ++overridden;
      expect(d.outcome == Outcome::Deny, "applicable prohibition did not override");
    }
  }
  expect(overridden > 50, "too few applicable prohibitions generated");
}

// 8
void negotiation_state_machine() {
  std::mt19937 rng(88);
  testing::PolicyGenerator gen(89);
  for (int trial = 0; trial < 500; ++trial) {
    const auto& ids = list_patterns();
    const std::string& id = ids[rng() % ids.size()].id;
    Params p = gen.pattern_params(id);
    p.erase("kind");
    Policy offer = instantiate(id, p);
    TransitionMonitor monitor;
    NegotiationState s = open_negotiation("n" + std::to_string(trial), offer);
    Iri consumer("https://consumer.example/c" + std::to_string(rng() % 5));
    for (int step = 0; step < 6; ++step) {
      int op = static_cast<int>(rng() % 3);
      Phase before = s.phase;
      try {
        s = op == 2 ? revoke(s, &monitor) : negotiate(s, consumer, op == 0, ProfileRegistry::builtin(), &monitor);
      } catch (const IllegalTransition&) {
        expect(s.phase == before, "rejected transition changed the phase");
      }
      expect(s.agreement.has_value() == (s.phase == Phase::Agreed || s.phase == Phase::Revoked),
             "agreement present in phase " + std::string(to_string(s.phase)));
      if (s.phase == Phase::Agreed) {
        std::vector<Rule> want = offer.rules;
        for (auto& r : want) {
          if (!r.assignee) r.assignee = consumer;
        }
        Policy expected = offer;
        expected.rules = want;
        expected.kind = PolicyKind::Agreement;
        expected.uid = s.agreement->uid;
        expect(semantic_equals(*s.agreement, expected), "agreement is not the offer with assignee bound");
      }
    }
    expect(monitor.illegal().empty(), "illegal transition: " + (monitor.illegal().empty() ? "" : monitor.illegal()[0]));
  }
}

// 9
void end_to_end_determinism() {
  auto path = testing::data_path("scenarios/transconnect-demo.json");
  std::string a = run(load_scenario(path)).log.to_ndjson();
  std::string b = run(load_scenario(path)).log.to_ndjson();
  expect(!a.empty(), "empty audit log");
  expect(a == b, "audit logs differ between runs");
}

// 10
void instantiate_classify() {
  testing::PolicyGenerator gen(1010);
  for (int round = 0; round < 25; ++round) {
    for (const auto& d : list_patterns()) {
      Params p = gen.pattern_params(d.id);
      Policy policy = instantiate(d.id, p);
      expect(validate_policy(policy, ProfileRegistry::builtin()).empty(), d.id + ": does not validate");
      auto back = parse(serialize(policy));
      expect(back.size() == 1 && semantic_equals(back[0], policy), d.id + ": does not round-trip");
      auto ids = classify(back[0]);
      expect(std::find(ids.begin(), ids.end(), d.id) != ids.end(), d.id + ": not recovered by classify");
    }
  }
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<void()> body;
};

}  // namespace

int main() {
  set_warning_sink([](std::string_view) {});
  const std::vector<Criterion> criteria = {
      {1, "corpus round-trip", 1.0, corpus_round_trip},
      {2, "Table 1 fidelity", 0, table_fidelity},
      {3, "Listing 1 semantics", 5.0, listing1_semantics},
      {4, "Listing 1 detective", 0, listing1_detective},
      {5, "Listing 2 semantics", 0, listing2_semantics},
      {6, "oracle equivalence", 30.0, oracle_equivalence},
      {7, "purity and fail-closed", 0, purity_and_fail_closed},
      {8, "negotiation state machine", 0, negotiation_state_machine},
      {9, "end-to-end determinism", 0, end_to_end_determinism},
      {10, "instantiate/classify consistency", 0, instantiate_classify},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string problem;
    try {
      c.body();
    } catch (const std::exception& e) {
      problem = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (problem.empty() && c.budget_s > 0 && secs > c.budget_s) {
      problem = "took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
    std::cout << "AC" << c.number << " " << (problem.empty() ? "PASS" : "FAIL") << " " << c.name << " (" << timing << ")";
    if (!problem.empty()) std::cout << ": " << problem;
    std::cout << "\n";
    failed += !problem.empty();
  }
  return failed == 0 ? 0 : 1;
}
