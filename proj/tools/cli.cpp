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

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dspolicy/enforcement.hpp"
#include "dspolicy/patterns.hpp"
#include "dspolicy/simulator.hpp"
#include "dspolicy/textio.hpp"
#include "json.hpp"

namespace dspolicy::cli {

using json = nlohmann::json;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << body;
}

std::vector<Policy> load_policies(const std::string& path) {
  try {
    return parse(slurp(path));
  } catch (const ParseError& e) {
    throw IoError(path + ":" + std::to_string(e.location().line) + ":" + std::to_string(e.location().column) +
                  ": " + e.message());
  }
}

Policy load_policy(const std::string& path) {
  auto policies = load_policies(path);
  if (policies.size() != 1) {
    throw IoError(path + ": expected one policy, found " + std::to_string(policies.size()));
  }
  return policies.front();
}

Timestamp time_opt(const std::string& text, const char* flag) {
  auto t = parse_datetime(text);
  if (!t) throw CLI::ValidationError(flag, "not an ISO 8601 date-time: " + text);
  return *t;
}

std::string pip_names(const std::set<PartyRole>& roles) {
  std::string out;
  for (auto r : roles) {
    if (!out.empty()) out += ",";
    out += to_string(r);
  }
  return out;
}

// subcommands

int cmd_validate(const std::string& file, const ProfileRegistry& registry, std::ostream& out, std::ostream& err) {
  auto policies = load_policies(file);
  if (policies.empty()) {
    err << file << ": no policy found\n";
    return kFindings;
  }
  bool ok = true;
  for (const auto& p : policies) {
    for (const auto& v : validate_policy(p, registry)) {
      err << p.uid.value << " " << v.path << ": " << v.message << "\n";
      ok = false;
    }
    for (const auto& v : lint_policy(p, registry)) err << "warning: " << p.uid.value << " " << v.path << ": " << v.message << "\n";
  }
  if (!ok) return kFindings;
  out << "valid\n";
  return kOk;
}

int cmd_patterns_list(bool as_json, bool markdown, std::ostream& out) {
  if (markdown) {
    out << catalog_markdown();
    return kOk;
  }
  for (const auto& d : list_patterns()) {
    if (as_json) {
      out << descriptor_to_json(d) << "\n";
    } else {
      out << d.id << "\t" << pip_names(d.pip_roles) << "\t" << to_string(d.pap_pdp_role) << "\t"
          << to_string(d.enforcement_class) << "\t" << to_string(d.source) << "\n";
    }
  }
  return kOk;
}

int cmd_patterns_new(const std::string& id, const std::string& params_file, const std::string& out_file,
                     std::ostream& out) {
  json params = params_file.empty() ? json::object() : json::parse(slurp(params_file), nullptr, false);
  if (params.is_discarded()) throw IoError(params_file + ": not JSON");
  std::string ttl = serialize(instantiate(id, params));
  if (out_file.empty() || out_file == "-") {
    out << ttl;
  } else {
    spit(out_file, ttl);
  }
  return kOk;
}

int cmd_classify(const std::string& file, std::ostream& out) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& p : load_policies(file)) j[p.uid.value] = classify(p);
  out << j.dump(2) << "\n";
  return kOk;
}

struct EvaluateArgs {
  std::string agreement, request, state, state_out, attributes, regions, attestations, keys;
};

int cmd_evaluate(const EvaluateArgs& a, const ProfileRegistry& registry, std::ostream& out, std::ostream& err) {
  Policy agreement = load_policy(a.agreement);
  AccessRequest req;
  UsageState state;
  try {
    req = request_from_json(slurp(a.request));
    if (!a.state.empty()) state = state_from_json(slurp(a.state));
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  ProviderList pip;
  if (!a.attributes.empty()) {
    pip.push_back(std::make_shared<StaticAttributeProvider>(StaticAttributeProvider::from_json(slurp(a.attributes))));
  }
  if (!a.attestations.empty()) {
    KeyRing keys;
    if (!a.keys.empty()) {
      for (const auto& [issuer, key] : json::parse(slurp(a.keys)).items()) keys[Iri(issuer)] = key.get<std::string>();
    }
    auto provider = std::make_shared<AttestationProvider>(keys);
    std::istringstream lines(slurp(a.attestations));
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty()) provider->add(attestation_from_json(line));
    }
    pip.push_back(provider);
  }
  pip.push_back(std::make_shared<ConnectionCountProvider>(state));
  pip.push_back(std::make_shared<ClockProvider>());
  std::optional<RegionHierarchy> regions;
  if (!a.regions.empty()) regions = RegionHierarchy::from_json(slurp(a.regions));

  Decision d;
  try {
    d = evaluate_request(agreement, req, state, pip, {regions ? &*regions : nullptr, &registry});
  } catch (const InvalidAgreement& e) {
    err << e.what() << "\n";
    return kFindings;
  }
  out << decision_to_json(d) << "\n";
  if (!a.state_out.empty()) {
    spit(a.state_out, state_to_json(d.outcome == Outcome::Permit ? commit_usage(d, req, state) : state));
  }
  return kOk;
}

int cmd_simulate(const std::string& file, const std::string& dir, std::ostream& out) {
  Scenario s = load_scenario(file);
  RunResult r = run(s);
  if (!dir.empty()) write_outputs(s, r, dir);
  out << report_json(s, r);
  for (const auto& [neg, st] : r.obligations) {
    if (st.status == DutyStatus::Violated) return kFindings;
  }
  return kOk;
}

struct AuditArgs {
  std::string agreement, log, now, window_start, regions;
  bool open = false;
};

int cmd_audit_check(const AuditArgs& a, const ProfileRegistry& registry, std::ostream& out) {
  Policy agreement = load_policy(a.agreement);
  AuditLog log;
  try {
    log = AuditLog::from_ndjson(slurp(a.log));
  } catch (const std::invalid_argument& e) {
    throw IoError(a.log + ": " + e.what());
  }
  std::optional<RegionHierarchy> regions;
  if (!a.regions.empty()) regions = RegionHierarchy::from_json(slurp(a.regions));
  DetectiveOptions opts;
  opts.registry = &registry;
  opts.regions = regions ? &*regions : nullptr;
  opts.window_closed = !a.open;
  if (!a.window_start.empty()) opts.window_start = time_opt(a.window_start, "--window-start");
  int code = kOk;
  for (const auto& st : detective_check(agreement, log, time_opt(a.now, "--now"), opts)) {
    out << obligation_to_json(st) << "\n";
    if (st.status == DutyStatus::Violated) code = kFindings;
  }
  return code;
}

struct AttestArgs {
  std::string issuer, subject, claim, value, datatype = "xsd:string", expires, key_file, attestation, now;
};

int cmd_attest_issue(const AttestArgs& a, std::ostream& out) {
  std::string key = slurp(a.key_file);
  Attestation att = issue_attestation(Iri(a.issuer), Iri(a.subject), expand_name(a.claim),
                                      TypedLiteral{a.value, expand_name(a.datatype)},
                                      time_opt(a.expires, "--expires"), key);
  out << attestation_to_json(att) << "\n";
  return kOk;
}

int cmd_attest_verify(const AttestArgs& a, std::ostream& out) {
  Attestation att;
  try {
    att = attestation_from_json(slurp(a.attestation));
  } catch (const std::invalid_argument& e) {
    throw IoError(a.attestation + ": " + e.what());
  }
  VerifyResult v = verify_attestation(att, slurp(a.key_file), time_opt(a.now, "--now"));
  out << json{{"ok", v.ok}, {"reason", v.reason}}.dump() << "\n";
  return v.ok ? kOk : kFindings;
}

int cmd_serve(const std::string& file, const std::string& host, int port, std::ostream& err) {
  Scenario s = load_scenario(file);
  ProviderConnector connector(s.provider, s.regions);
  for (const auto& a : s.assets) connector.add_asset(a);
  for (const auto& o : s.offers) connector.add_offer(o);
  err << "listening on " << host << ":" << port << "\n";
  serve(connector, host, port);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Usage-control policies for data spaces", "dspctl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string file, out_path, id, params;
  auto* validate = app.add_subcommand("validate", "Check policies against the information model");
  validate->add_option("file", file, "Turtle file")->required();

  auto* canon = app.add_subcommand("canon", "Print the canonical serialization");
  canon->add_option("file", file, "Turtle file")->required();

  auto* patterns = app.add_subcommand("patterns", "Pattern catalog");
  patterns->require_subcommand(1);
  bool as_json = false, markdown = false;
  auto* list = patterns->add_subcommand("list", "One line per pattern");
  list->add_flag("--json", as_json, "JSON descriptors");
  list->add_flag("--markdown", markdown, "Markdown table");
  auto* create = patterns->add_subcommand("new", "Instantiate a pattern");
  create->add_option("id", id, "Pattern id")->required();
  create->add_option("--params", params, "Parameter file (JSON)");
  create->add_option("-o,--output", out_path, "Output Turtle file");

  auto* cls = app.add_subcommand("classify", "Patterns a policy uses");
  cls->add_option("file", file, "Turtle file")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Decide one request");
  evaluate->add_option("--agreement", ev.agreement, "Agreement (Turtle)")->required();
  evaluate->add_option("--request", ev.request, "Request (JSON)")->required();
  evaluate->add_option("--state", ev.state, "Usage state (JSON)");
  evaluate->add_option("--state-out", ev.state_out, "Write the state after commit");
  evaluate->add_option("--attributes", ev.attributes, "Static attributes (JSON)");
  evaluate->add_option("--regions", ev.regions, "Region hierarchy (JSON)");
  evaluate->add_option("--attestations", ev.attestations, "Attestations (NDJSON)");
  evaluate->add_option("--keys", ev.keys, "Issuer keys (JSON)");

  auto* simulate = app.add_subcommand("simulate", "Replay a scenario");
  simulate->add_option("scenario", file, "Scenario (JSON)")->required();
  simulate->add_option("-o,--output", out_path, "Output directory");

  AuditArgs au;
  auto* audit = app.add_subcommand("audit-check", "Duty statuses from an audit log");
  audit->add_option("--agreement", au.agreement, "Agreement (Turtle)")->required();
  audit->add_option("--log", au.log, "Audit log (NDJSON)")->required();
  audit->add_option("--now", au.now, "Evaluation time")->required();
  audit->add_option("--window-start", au.window_start, "Start of periodic duty windows");
  audit->add_flag("--open", au.open, "Window still open");
  audit->add_option("--regions", au.regions, "Region hierarchy (JSON)");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Provider connector over HTTP");
  srv->add_option("scenario", file, "Scenario supplying assets and offers")->required();
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  AttestArgs at;
  auto* attest = app.add_subcommand("attest", "Issue or verify attestations");
  attest->require_subcommand(1);
  auto* issue = attest->add_subcommand("issue", "Sign a claim");
  issue->add_option("--issuer", at.issuer)->required();
  issue->add_option("--subject", at.subject)->required();
  issue->add_option("--claim", at.claim)->required();
  issue->add_option("--value", at.value)->required();
  issue->add_option("--datatype", at.datatype);
  issue->add_option("--expires", at.expires)->required();
  issue->add_option("--key", at.key_file, "Issuer key file")->required();
  auto* verify = attest->add_subcommand("verify", "Check one attestation");
  verify->add_option("attestation", at.attestation, "Attestation (JSON)")->required();
  verify->add_option("--key", at.key_file, "Issuer key file")->required();
  verify->add_option("--now", at.now)->required();

  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    bool known = false;
    for (auto* s : app.get_subcommands({})) known = known || s->get_name() == args[0];
    if (!known) {
      err << "error: unknown subcommand '" << args[0] << "'\n" << app.help();
      return kUsage;
    }
  }

  std::vector<const char*> argv{"dspctl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = &app;
    for (auto* s : app.get_subcommands()) sub = s;
    err << sub->help();
    return kUsage;
  }

  try {
    ProfileRegistry registry = ProfileRegistry::from_environment();
    if (*validate) return cmd_validate(file, registry, out, err);
    if (*canon) {
      out << serialize(load_policies(file));
      return kOk;
    }
    if (*list) return cmd_patterns_list(as_json, markdown, out);
    if (*create) return cmd_patterns_new(id, params, out_path, out);
    if (*cls) return cmd_classify(file, out);
    if (*evaluate) return cmd_evaluate(ev, registry, out, err);
    if (*simulate) return cmd_simulate(file, out_path, out);
    if (*audit) return cmd_audit_check(au, registry, out);
    if (*srv) return cmd_serve(file, host, port, err);
    if (*issue) return cmd_attest_issue(at, out);
    if (*verify) return cmd_attest_verify(at, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PatternError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kUsage;
}

}  // namespace dspolicy::cli
