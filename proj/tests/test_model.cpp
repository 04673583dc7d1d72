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

#include "doctest.h"
#include "dspolicy/model.hpp"
#include "dspolicy/profile.hpp"
#include "dspolicy/textio.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace dspolicy;

namespace {

Policy listing1() { return parse(testing::read_fixture("listing1.ttl")).at(0); }

}  // namespace

TEST_CASE("Listing 1 validates without violations or warnings") {
  const auto& reg = ProfileRegistry::builtin();
  Policy p = listing1();
  CHECK(validate_policy(p, reg).empty());
  CHECK(lint_policy(p, reg).empty());
  CHECK(validate_policy(p, reg) == validate_policy(p, reg));
}

TEST_CASE("policy with zero rules has exactly one violation") {
  Policy p;
  p.uid = Iri("http://example.com/policies#empty");
  auto v = validate_policy(p, ProfileRegistry::builtin());
  REQUIRE(v.size() == 1);
  CHECK(v[0].message == "policy has no rules");
}

TEST_CASE("Agreement permission without assignee names the rule") {
  Policy p = listing1();
  p.kind = PolicyKind::Agreement;
  CHECK(validate_policy(p, ProfileRegistry::builtin()).empty());
  p.rules[0].assignee.reset();
  auto v = validate_policy(p, ProfileRegistry::builtin());
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "rule[0]");
  CHECK(v[0].message.find("assignee") != std::string::npos);
}

TEST_CASE("Offer rules need an assigner") {
  Policy p = listing1();
  p.kind = PolicyKind::Offer;
  p.rules[0].assignee.reset();
  CHECK(validate_policy(p, ProfileRegistry::builtin()).empty());
  p.rules[0].assigner.reset();
  CHECK(validate_policy(p, ProfileRegistry::builtin()).size() == 1);
}

TEST_CASE("structural violations") {
  const auto& reg = ProfileRegistry::builtin();
  Policy p = listing1();

  SUBCASE("unknown operator") {
    p.rules[0].constraints[0].op = odrl("approximately");
    auto v = validate_policy(p, reg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].path == "rule[0].constraint[0]");
    CHECK(v[0].message == "unknown operator odrl:approximately");
  }
  SUBCASE("malformed literal") {
    p.rules[0].constraints[0].right_operand = TypedLiteral{"soon", xsd("dateTime")};
    auto v = validate_policy(p, reg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("malformed") != std::string::npos);
  }
  SUBCASE("second-level duty nesting") {
    p.rules[0].duties[0].duties.push_back(p.rules[0].duties[1]);
    auto v = validate_policy(p, reg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message == "duty carries nested duties");
  }
  SUBCASE("duties under a prohibition") {
    p.rules[0].kind = RuleKind::Prohibition;
    auto v = validate_policy(p, reg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message == "duties nested under a Prohibition");
  }
  SUBCASE("missing action and relative IRIs") {
    p.rules[0].duties[1].action.action = Iri();
    p.rules[0].target = Iri("files/file1");
    CHECK(validate_policy(p, reg).size() == 2);
  }
}

TEST_CASE("unknown vocabulary is a warning, not a violation") {
  const auto& reg = ProfileRegistry::builtin();
  Policy p = listing1();
  p.rules[0].action.action = Iri("http://example.com/vocab#teleport");
  p.rules[0].constraints[0].left_operand = Iri("http://example.com/vocab#moonPhase");
  CHECK(validate_policy(p, reg).empty());
  auto w = lint_policy(p, reg);
  CHECK(w.size() == 2);
}

TEST_CASE("every reachable duty of Listing 1 is a leaf duty") {
  Policy p = listing1();
  int duties = 0;
  for_each_rule(p, [&](const Rule& r, const Rule* parent) {
    if (parent) {
      ++duties;
      CHECK(r.kind == RuleKind::Duty);
      CHECK(r.duties.empty());
    }
  });
  CHECK(duties == 2);
}

TEST_CASE("semantic_equals ignores duty order and detects field changes") {
  Policy p = listing1();
  Policy reordered = p;
  std::reverse(reordered.rules[0].duties.begin(), reordered.rules[0].duties.end());
  CHECK(semantic_equals(p, reordered));
  CHECK_FALSE(p == reordered);

  Policy changed = p;
  changed.rules[0].constraints[0].right_operand = plain_literal("1023");
  CHECK_FALSE(semantic_equals(p, changed));
}

TEST_CASE("effective duties inherit parties from the permission") {
  Policy p = listing1();
  auto duties = effective_duties(p.rules[0]);
  REQUIRE(duties.size() == 2);
  for (const auto& d : duties) {
    CHECK(d.assigner == Iri("https://www.example.com/provider"));
    CHECK(d.assignee == Iri("https://www.example.com/consumer"));
    CHECK(d.target == Iri("http://example.com/files/file1"));
  }
}

TEST_CASE("semantic_equals is an equivalence relation on random policies") {
  testing::PolicyGenerator gen(20230710);
  std::vector<Policy> pool;
  for (int i = 0; i < 60; ++i) {
    Policy p = gen.policy();
    pool.push_back(p);
    pool.push_back(gen.shuffled(p));
  }
  for (size_t i = 0; i < pool.size(); i += 2) CHECK(semantic_equals(pool[i], pool[i + 1]));
  for (const auto& a : pool) {
    CHECK(semantic_equals(a, a));
    for (const auto& b : pool) {
      bool ab = semantic_equals(a, b);
      CHECK(ab == semantic_equals(b, a));
      if (!ab) continue;
      for (const auto& c : pool) {
        if (semantic_equals(b, c)) CHECK(semantic_equals(a, c));
      }
    }
  }
}
