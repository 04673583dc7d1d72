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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "dspolicy/patterns.hpp"
#include "dspolicy/textio.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace dspolicy;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run dspctl(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dspolicy-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& body) { std::ofstream(p, std::ios::binary) << body; }

std::string d(const std::string& name) { return testing::data_path(name); }

std::string agreement_file() {
  auto p = scratch("listing1-agreement.ttl");
  write(p, serialize(testing::listing1_agreement()));
  return p.string();
}

}  // namespace

TEST_CASE("validate") {
  Run r = dspctl({"validate", d("listing1.ttl")});
  CHECK(r.code == 0);
  CHECK(r.out == "valid\n");

  auto bad = scratch("bad.ttl");
  write(bad, "@prefix odrl: <http://www.w3.org/ns/odrl/2/> .\n<http://e.com/p> a odrl:Set .\n");
  r = dspctl({"validate", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());

  auto broken = scratch("broken.ttl");
  write(broken, "<http://e.com/p> a foo:Set .\n");
  r = dspctl({"validate", broken.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find(":1:") != std::string::npos);

  CHECK(dspctl({"validate", "/no/such/file.ttl"}).code == 3);
}

TEST_CASE("usage errors exit 2 with usage text") {
  for (auto args : std::vector<std::vector<std::string>>{
           {}, {"frobnicate"}, {"validate"}, {"validate", "--bogus", "x"}, {"patterns"}, {"evaluate", "--agreement", "a"}}) {
    Run r = dspctl(args);
    CAPTURE(args.size());
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  Run unknown = dspctl({"frobnicate"});
  CHECK(unknown.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  Run help = dspctl({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("audit-check") != std::string::npos);
}

TEST_CASE("canon is idempotent") {
  for (const char* f : {"listing1.ttl", "listing2.ttl"}) {
    Run once = dspctl({"canon", d(f)});
    REQUIRE(once.code == 0);
    auto p = scratch(std::string("canon-") + f);
    write(p, once.out);
    Run twice = dspctl({"canon", p.string()});
    CHECK(twice.out == once.out);
    CHECK(semantic_equals(parse(once.out).at(0), parse(testing::read_fixture(f)).at(0)));
  }
}

TEST_CASE("patterns list matches the table transcription") {
  Run r = dspctl({"patterns", "list"});
  REQUIRE(r.code == 0);
  auto rows = lines(r.out);
  json golden = json::parse(testing::read_fixture("table1.json"));
  REQUIRE(rows.size() == 22);
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string pip;
    for (const auto& p : golden[i]["pip"]) pip += (pip.empty() ? "" : ",") + p.get<std::string>();
    std::string expect = golden[i]["id"].get<std::string>() + "\t" + pip + "\t" + golden[i]["pap_pdp"].get<std::string>() +
                         "\t" + golden[i]["enforcement"].get<std::string>() + "\t" + golden[i]["source"].get<std::string>();
    CHECK(rows[i] == expect);
  }
  Run js = dspctl({"patterns", "list", "--json"});
  for (const auto& l : lines(js.out)) CHECK(json::parse(l).contains("parameters"));
  CHECK(lines(dspctl({"patterns", "list", "--markdown"}).out).size() == 24);
}

TEST_CASE("patterns new") {
  auto params = scratch("params.json");
  json p = {{"assigner", "https://www.example.com/provider"}, {"target", "http://example.com/files/file1"}, {"max_count", 3}};
  write(params, p.dump());
  auto out = scratch("ac.ttl");
  Run r = dspctl({"patterns", "new", "access-count", "--params", params.string(), "-o", out.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(semantic_equals(parse(ss.str()).at(0), instantiate("access-count", p)));

  Run stdout_only = dspctl({"patterns", "new", "access-count", "--params", params.string()});
  CHECK(stdout_only.out == ss.str());

  write(params, json{{"assigner", "https://www.example.com/provider"}}.dump());
  Run missing = dspctl({"patterns", "new", "access-count", "--params", params.string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("'target'") != std::string::npos);
  CHECK(dspctl({"patterns", "new", "warp-drive"}).code == 2);
}

TEST_CASE("classify prints JSON") {
  Run r = dspctl({"classify", d("listing1.ttl")});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  auto ids = j["http://example.com/policies#consumer-administered"].get<std::vector<std::string>>();
  CHECK(std::find(ids.begin(), ids.end(), "deletion") != ids.end());
}

TEST_CASE("evaluate threads state through files") {
  std::string agreement = agreement_file();
  auto req = scratch("req.json");
  write(req, json{{"requester", testing::kConsumer.value},
                  {"target", testing::kFile1.value},
                  {"action", "odrl:read"},
                  {"timestamp", "2023-07-02T00:00:00Z"},
                  {"units", 1000}}
                 .dump());
  auto s1 = scratch("s1.json"), s2 = scratch("s2.json");
  Run first = dspctl({"evaluate", "--agreement", agreement, "--request", req.string(), "--state-out", s1.string()});
  REQUIRE(first.code == 0);
  CHECK(json::parse(first.out)["outcome"] == "Permit");
  Run second = dspctl({"evaluate", "--agreement", agreement, "--request", req.string(), "--state", s1.string(),
                       "--state-out", s2.string()});
  CHECK(json::parse(second.out)["outcome"] == "Deny");

  Run not_agreement = dspctl({"evaluate", "--agreement", d("listing1.ttl"), "--request", req.string()});
  CHECK(not_agreement.code == 1);
  CHECK(not_agreement.err.find("invalid agreement") != std::string::npos);

  write(req, "{");
  CHECK(dspctl({"evaluate", "--agreement", agreement, "--request", req.string()}).code == 3);
}

TEST_CASE("audit-check reports the missed deletion") {
  Run r = dspctl({"audit-check", "--agreement", d("listing1.ttl"), "--log", d("audit/violating-deletion.ndjson"), "--now",
                  "2023-07-11T00:00:00Z"});
  CHECK(r.code == 1);
  int violated = 0;
  for (const auto& l : lines(r.out)) violated += json::parse(l)["status"] == "Violated";
  CHECK(violated == 1);

  Run early = dspctl({"audit-check", "--agreement", d("listing1.ttl"), "--log", d("audit/violating-deletion.ndjson"),
                      "--now", "2023-07-09T00:00:00Z"});
  CHECK(early.code == 0);

  Run bad_time = dspctl({"audit-check", "--agreement", d("listing1.ttl"), "--log", d("audit/violating-deletion.ndjson"),
                         "--now", "yesterday"});
  CHECK(bad_time.code == 2);
}

TEST_CASE("simulate writes outputs and flags violations") {
  auto dir = scratch("sim");
  Run ok = dspctl({"simulate", d("scenarios/transconnect-demo.json"), "-o", dir.string()});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["revocations"].empty());
  CHECK(std::filesystem::exists(dir / "audit.ndjson"));
  Run bad = dspctl({"simulate", d("scenarios/listing1-violating.json")});
  CHECK(bad.code == 1);
  CHECK(dspctl({"simulate", "/no/scenario.json"}).code == 3);
}

TEST_CASE("attestations") {
  auto key = scratch("issuer.key");
  write(key, "issuer-secret");
  Run issued = dspctl({"attest", "issue", "--issuer", "https://ca.example", "--subject", testing::kConsumer.value,
                       "--claim", "dsp:certified", "--value", "true", "--datatype", "xsd:boolean", "--expires",
                       "2024-01-01T00:00:00Z", "--key", key.string()});
  REQUIRE(issued.code == 0);
  auto att = scratch("att.json");
  write(att, issued.out);
  CHECK(dspctl({"attest", "verify", att.string(), "--key", key.string(), "--now", "2023-07-01T00:00:00Z"}).code == 0);
  Run expired = dspctl({"attest", "verify", att.string(), "--key", key.string(), "--now", "2024-07-01T00:00:00Z"});
  CHECK(expired.code == 1);
  CHECK(json::parse(expired.out)["reason"] == "expired");
  write(key, "other");
  CHECK(dspctl({"attest", "verify", att.string(), "--key", key.string(), "--now", "2023-07-01T00:00:00Z"}).code == 1);
}

TEST_CASE("DSP_PROFILE selects the vocabulary") {
  auto prof = scratch("empty-profile.ttl");
  write(prof, "@prefix odrl: <http://www.w3.org/ns/odrl/2/> .\n");
  setenv("DSP_PROFILE", prof.string().c_str(), 1);
  Run r = dspctl({"validate", d("listing1.ttl")});
  unsetenv("DSP_PROFILE");
  CHECK(r.err.find("warning") != std::string::npos);

  setenv("DSP_PROFILE", "/no/profile.ttl", 1);
  Run missing = dspctl({"validate", d("listing1.ttl")});
  unsetenv("DSP_PROFILE");
  CHECK(missing.code == 3);
}
