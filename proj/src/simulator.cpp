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

#include "dspolicy/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dspolicy/patterns.hpp"
#include "dspolicy/textio.hpp"

namespace dspolicy {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::pair<Phase, std::string_view> kPhases[] = {
    {Phase::Offered, "Offered"}, {Phase::Requested, "Requested"}, {Phase::Agreed, "Agreed"},
    {Phase::Declined, "Declined"}, {Phase::Revoked, "Revoked"},
};

const std::set<std::string> kActions = {"negotiate", "request", "evidence", "skip-duty",
                                        "release",   "revoke",  "set-attribute"};

Timestamp time_arg(const json& j, const char* key) {
  auto t = parse_datetime(j.at(key).get<std::string>());
  if (!t) throw ScenarioError(std::string("bad ") + key + " '" + j.at(key).get<std::string>() + "'");
  return *t;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lexical(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// request and evidence bodies name their negotiation either way
std::string negotiation_ref(const json& body) {
  if (body.contains("negotiation")) return body["negotiation"].get<std::string>();
  return body.value("offer", std::string());
}

}  // namespace

std::string_view to_string(Phase phase) {
  for (auto [p, name] : kPhases) {
    if (p == phase) return name;
  }
  return "?";
}

bool legal_transition(Phase from, Phase to) {
  switch (from) {
    case Phase::Offered: return to == Phase::Requested;
    case Phase::Requested: return to == Phase::Agreed || to == Phase::Declined;
    case Phase::Agreed: return to == Phase::Revoked;
    default: return false;
  }
}

void NegotiationState::transition(Phase to) {
  if (!legal_transition(phase, to)) {
    throw IllegalTransition("illegal transition: " + std::string(to_string(phase)) + " -> " +
                            std::string(to_string(to)));
  }
  phase = to;
}

void TransitionMonitor::observe(const std::string& id, Phase from, Phase to) {
  ++observed_;
  if (!legal_transition(from, to)) {
    illegal_.push_back(id + ": " + std::string(to_string(from)) + " -> " + std::string(to_string(to)));
  }
}

Policy bind_agreement(const Policy& offer, const Iri& consumer, const std::string& negotiation_id) {
  Policy a = offer;
  a.kind = PolicyKind::Agreement;
  a.uid = Iri(offer.uid.value + "-agreement-" + negotiation_id);
  for (auto& r : a.rules) {
    if (!r.assignee) r.assignee = consumer;
  }
  return a;
}

NegotiationState open_negotiation(std::string id, Policy offer) {
  NegotiationState s;
  s.id = std::move(id);
  s.offer = std::move(offer);
  return s;
}

NegotiationState negotiate(NegotiationState state, const Iri& consumer, bool accept, const ProfileRegistry& registry,
                           TransitionMonitor* monitor) {
  auto step = [&](Phase to) {
    Phase from = state.phase;
    state.transition(to);
    if (monitor) monitor->observe(state.id, from, to);
  };
  step(Phase::Requested);
  std::string problem;
  if (state.offer.kind != PolicyKind::Offer) {
    problem = "offer kind is " + std::string(to_string(state.offer.kind));
  } else if (auto v = validate_policy(state.offer, registry); !v.empty()) {
    problem = "invalid offer: " + v.front().path + ": " + v.front().message;
  }
  if (!problem.empty()) {
    step(Phase::Declined);
    state.reason = problem;
  } else if (!accept) {
    step(Phase::Declined);
    state.reason = "declined by consumer";
  } else {
    step(Phase::Agreed);
    state.agreement = bind_agreement(state.offer, consumer, state.id);
  }
  return state;
}

NegotiationState negotiate(const Policy& offer, const Iri& consumer, bool accept) {
  return negotiate(open_negotiation("n1", offer), consumer, accept);
}

NegotiationState revoke(NegotiationState state, TransitionMonitor* monitor) {
  Phase from = state.phase;
  state.transition(Phase::Revoked);
  if (monitor) monitor->observe(state.id, from, Phase::Revoked);
  state.reason = "revoked";
  return state;
}

// scenarios

Scenario scenario_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    json j = json::parse(text);
    s.name = j.value("name", std::string("scenario"));
    s.provider = Iri(j.at("provider").get<std::string>());
    s.consumer = Iri(j.at("consumer").get<std::string>());
    s.start = time_arg(j, "start");
    s.end = time_arg(j, "end");
    auto step = parse_duration(j.value("clock_step", std::string("PT1S")));
    if (!step || step->count() <= 0) throw ScenarioError("clock_step must be a positive duration");
    s.clock_step = *step;
    if (j.contains("regions")) {
      const json& r = j["regions"];
      s.regions = RegionHierarchy::from_json(r.is_string() ? read_file(base_dir / r.get<std::string>()) : r.dump());
    }
    for (const auto& a : j.value("assets", json::array())) {
      s.assets.push_back({Iri(a.at("id").get<std::string>()), a.value("title", std::string()),
                          a.value("payload", std::string())});
    }
    for (const auto& o : j.value("offers", json::array())) {
      OfferSpec offer;
      offer.id = o.at("id").get<std::string>();
      offer.asset = Iri(o.at("asset").get<std::string>());
      if (o.contains("policy")) {
        auto policies = parse(read_file(base_dir / o["policy"].get<std::string>()));
        if (policies.empty()) throw ScenarioError(offer.id + ": no policy in " + o["policy"].get<std::string>());
        offer.policy = policies.front();
        offer.policy.kind = PolicyKind::Offer;
      } else {
        Params p = o.value("params", Params::object());
        if (!p.contains("assigner")) p["assigner"] = s.provider.value;
        if (!p.contains("target")) p["target"] = offer.asset.value;
        if (!p.contains("kind")) p["kind"] = "Offer";
        if (!p.contains("uid")) p["uid"] = s.provider.value + "/offers/" + offer.id;
        if (o.contains("with")) p["with"] = o["with"];
        offer.policy = instantiate(o.at("pattern").get<std::string>(), p);
      }
      s.offers.push_back(std::move(offer));
    }
    for (const auto& e : j.value("script", json::array())) {
      s.script.push_back({time_arg(e, "at"), e.at("action").get<std::string>(), e.value("args", json::object())});
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  } catch (const ParseError& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  return scenario_from_json(read_file(file), file.parent_path());
}

void validate_scenario(const Scenario& s) {
  if (s.end < s.start) throw ScenarioError("end precedes start");
  if (s.clock_step.count() <= 0) throw ScenarioError("clock_step must be positive");
  std::set<Iri> assets;
  for (const auto& a : s.assets) {
    if (!assets.insert(a.id).second) throw ScenarioError("duplicate asset " + a.id.value);
  }
  std::set<std::string> offers;
  for (const auto& o : s.offers) {
    if (!assets.count(o.asset)) throw ScenarioError("offer " + o.id + " references unknown asset " + o.asset.value);
    if (!offers.insert(o.id).second) throw ScenarioError("duplicate offer " + o.id);
  }
  std::set<std::string> negotiations;
  std::optional<Timestamp> prev;
  for (size_t i = 0; i < s.script.size(); ++i) {
    const auto& e = s.script[i];
    std::string where = "script[" + std::to_string(i) + "]";
    if (!kActions.count(e.action)) throw ScenarioError(where + ": unknown action '" + e.action + "'");
    if (e.at < s.start || e.at > s.end) throw ScenarioError(where + ": outside the scenario window");
    if (prev && e.at < *prev) throw ScenarioError(where + ": timestamps must not decrease");
    prev = e.at;
    if (!e.args.is_object()) throw ScenarioError(where + ": args must be an object");
    if (e.args.contains("target") && !assets.count(Iri(e.args["target"].get<std::string>()))) {
      throw ScenarioError(where + ": unknown asset " + e.args["target"].get<std::string>());
    }
    if (e.action == "negotiate") {
      std::string offer = e.args.value("offer", std::string());
      if (!offers.count(offer)) throw ScenarioError(where + ": unknown offer '" + offer + "'");
      negotiations.insert(e.args.value("id", offer));
    } else if (e.action == "request" || e.action == "evidence" || e.action == "revoke") {
      std::string ref = negotiation_ref(e.args);
      if (!negotiations.count(ref)) throw ScenarioError(where + ": unknown negotiation '" + ref + "'");
    } else if (e.action == "set-attribute" && (!e.args.contains("operand") || !e.args.contains("value"))) {
      throw ScenarioError(where + ": set-attribute needs operand and value");
    }
  }
}

// provider connector

ProviderConnector::ProviderConnector(Iri id, std::optional<RegionHierarchy> regions)
    : id_(std::move(id)), regions_(std::move(regions)), attributes_(std::make_shared<StaticAttributeProvider>()) {}

void ProviderConnector::add_asset(CatalogAsset asset) {
  Iri key = asset.id;
  assets_[key] = std::move(asset);
}

void ProviderConnector::add_offer(OfferSpec offer) {
  std::string key = offer.id;
  offers_[key] = std::move(offer);
}

ProviderList ProviderConnector::providers() const {
  return {attributes_, std::make_shared<ConnectionCountProvider>(state_), std::make_shared<ClockProvider>()};
}

const NegotiationState* ProviderConnector::negotiation_for(const json& body) const {
  auto it = negotiations_.find(negotiation_ref(body));
  return it == negotiations_.end() ? nullptr : &it->second;
}

Iri ProviderConnector::asset_for(const NegotiationState& neg) const {
  auto it = offer_of_.find(neg.id);
  return it == offer_of_.end() ? Iri() : offers_.at(it->second).asset;
}

json ProviderConnector::handle(const Message& m) {
  try {
    if (m.type == "negotiate") return on_negotiate(m);
    if (m.type == "request") return on_request(m);
    if (m.type == "evidence") return on_evidence(m);
    if (m.type == "release") return on_release(m);
    if (m.type == "revoke") return on_revoke(m);
    if (m.type == "set-attribute") return on_set_attribute(m);
    return {{"error", "unknown message type '" + m.type + "'"}};
  } catch (const json::exception& e) {
    return {{"error", std::string("malformed message: ") + e.what()}};
  } catch (const std::invalid_argument& e) {
    return {{"error", e.what()}};
  }
}

json ProviderConnector::on_negotiate(const Message& m) {
  std::string offer_id = m.body.at("offer").get<std::string>();
  auto offer = offers_.find(offer_id);
  if (offer == offers_.end()) return {{"error", "unknown offer '" + offer_id + "'"}};
  std::string id = m.body.value("id", offer_id);
  auto it = negotiations_.find(id);
  NegotiationState current = it != negotiations_.end() ? it->second : open_negotiation(id, offer->second.policy);
  NegotiationState next = negotiate(current, m.sender, m.body.value("accept", true), ProfileRegistry::builtin(),
                                    &monitor_);
  negotiations_[id] = next;
  offer_of_[id] = offer_id;
  json reply{{"negotiation", id}, {"phase", std::string(to_string(next.phase))}};
  if (next.agreement) reply["agreement"] = next.agreement->uid.value;
  if (!next.reason.empty()) reply["reason"] = next.reason;
  return reply;
}

json ProviderConnector::on_request(const Message& m) {
  std::string ref = negotiation_ref(m.body);
  const NegotiationState* neg = negotiation_for(m.body);
  json req_json{{"requester", m.sender.value},
                {"action", m.body.value("action", std::string("odrl:use"))},
                {"timestamp", format_datetime(m.at)},
                {"units", m.body.value("units", std::uint64_t{1})},
                {"attributes", m.body.value("attributes", json::object())}};
  if (m.body.contains("target")) {
    req_json["target"] = m.body["target"];
  } else {
    req_json["target"] = neg ? asset_for(*neg).value : std::string();
  }
  AccessRequest req = request_from_json(req_json.dump());

  DecisionEntry entry{m.at, ref, req.action, Outcome::NotApplicable, EnforcementAction::Block, "", std::nullopt};
  if (!neg || !neg->agreement) {
    AuditRecord r;
    r.at = m.at;
    r.actor = m.sender;
    r.action = req.action;
    r.target = req.target;
    r.outcome = AuditOutcome::Denied;
    r.detail = "no agreement";
    log_.append(r);
    entry.reason = "no agreement";
    decisions_.push_back(entry);
    return {{"outcome", "NotApplicable"}, {"enforcement", "Block"}, {"reason", entry.reason}};
  }

  PepOptions opts;
  opts.regions = regions_ ? &*regions_ : nullptr;
  opts.revoked = neg->phase == Phase::Revoked;
  PepResult res = pep_handle(req, *neg->agreement, state_, providers(), log_, opts);
  state_ = res.state;
  entry.outcome = res.decision.outcome;
  entry.enforcement = res.action;
  entry.reason = res.decision.reason;
  if (opts.revoked) entry.reason = "agreement revoked";
  if (res.action == EnforcementAction::Delay) {
    entry.reason = "waiting on preconditions";
  }
  json reply{{"outcome", std::string(to_string(entry.outcome))},
             {"enforcement", std::string(to_string(res.action))},
             {"reason", entry.reason}};
  if (res.action == EnforcementAction::Allow && (res.decision.opens_connection || m.body.value("hold", false))) {
    OngoingUsage u;
    u.id = next_usage_++;
    u.request = req;
    u.key = *res.decision.usage_key;
    u.started = m.at;
    u.connection = res.decision.opens_connection;
    ongoing_[neg->id].push_back(u);
    entry.usage_id = u.id;
    reply["usage"] = u.id;
  }
  decisions_.push_back(entry);
  return reply;
}

json ProviderConnector::on_evidence(const Message& m) {
  const NegotiationState* neg = negotiation_for(m.body);
  if (!neg || !neg->agreement) return {{"error", "no agreement for '" + negotiation_ref(m.body) + "'"}};
  Iri target = m.body.contains("target") ? Iri(m.body["target"].get<std::string>()) : asset_for(*neg);
  std::map<std::string, std::string> evidence;
  const json reported = m.body.value("evidence", json::object());
  for (const auto& [k, v] : reported.items()) evidence[k] = lexical(v);
  const AuditRecord& r = record_evidence(log_, m.sender, expand_name(m.body.at("action").get<std::string>()), target,
                                         m.at, evidence, neg->agreement->uid);
  return {{"seq", r.seq}, {"detail", r.detail}};
}

json ProviderConnector::on_release(const Message& m) {
  std::uint64_t id = m.body.at("usage").get<std::uint64_t>();
  for (auto& [neg, usages] : ongoing_) {
    auto it = std::find_if(usages.begin(), usages.end(), [&](const OngoingUsage& u) { return u.id == id; });
    if (it == usages.end()) continue;
    if (it->connection) state_ = release_connection(it->key, state_);
    usages.erase(it);
    return {{"released", id}};
  }
  return {{"error", "unknown usage " + std::to_string(id)}};
}

json ProviderConnector::on_revoke(const Message& m) {
  std::string ref = negotiation_ref(m.body);
  auto it = negotiations_.find(ref);
  if (it == negotiations_.end()) return {{"error", "unknown negotiation '" + ref + "'"}};
  it->second = revoke(it->second, &monitor_);
  auto& usages = ongoing_[ref];
  for (auto u = usages.rbegin(); u != usages.rend(); ++u) {
    AuditRecord r;
    r.at = m.at;
    r.actor = u->request.requester;
    r.action = u->request.action;
    r.target = u->request.target;
    r.outcome = AuditOutcome::Revoked;
    r.detail = "agreement revoked";
    r.agreement = it->second.agreement->uid;
    log_.append(r);
    revocations_.push_back({u->id, r.actor, r.target, m.at, r.detail});
    if (u->connection) state_ = release_connection(u->key, state_);
  }
  usages.clear();
  return {{"negotiation", ref}, {"phase", "Revoked"}};
}

json ProviderConnector::on_set_attribute(const Message& m) {
  Iri subject = m.body.contains("subject") ? Iri(m.body["subject"].get<std::string>()) : m.sender;
  TypedLiteral value{lexical(m.body.at("value")), expand_name(m.body.value("datatype", std::string("xsd:string")))};
  attributes_->set(subject, expand_name(m.body.at("operand").get<std::string>()), value);
  return {{"set", m.body["operand"]}};
}

void ProviderConnector::tick(Timestamp now) {
  MonitorOptions opts;
  opts.regions = regions_ ? &*regions_ : nullptr;
  for (auto& [id, usages] : ongoing_) {
    if (usages.empty()) continue;
    const NegotiationState& neg = negotiations_.at(id);
    if (neg.phase != Phase::Agreed) continue;
    std::map<std::uint64_t, OngoingUsage> before;
    for (const auto& u : usages) before[u.id] = u;
    auto revoked = continuous_monitor_step(usages, *neg.agreement, state_, providers(), now, log_, opts);
    for (const auto& ev : revoked) {
      const OngoingUsage& u = before.at(ev.usage_id);
      if (u.connection) state_ = release_connection(u.key, state_);
      revocations_.push_back(ev);
    }
  }
}

std::vector<std::pair<std::string, ObligationStatus>> ProviderConnector::obligations(Timestamp now) const {
  std::vector<std::pair<std::string, ObligationStatus>> out;
  DetectiveOptions opts;
  opts.regions = regions_ ? &*regions_ : nullptr;
  for (const auto& [id, neg] : negotiations_) {
    if (!neg.agreement) continue;
    for (auto& s : detective_check(*neg.agreement, log_, now, opts)) out.emplace_back(id, std::move(s));
  }
  return out;
}

// replay

RunResult run(const Scenario& scenario) {
  validate_scenario(scenario);
  ProviderConnector provider(scenario.provider, scenario.regions);
  for (const auto& a : scenario.assets) provider.add_asset(a);
  for (const auto& o : scenario.offers) provider.add_offer(o);

  RunResult result;
  std::deque<Message> queue;
  size_t next = 0;
  for (Timestamp t = scenario.start;; t += scenario.clock_step) {
    if (t > scenario.end) t = scenario.end;
    for (; next < scenario.script.size() && scenario.script[next].at <= t; ++next) {
      const ScriptEntry& e = scenario.script[next];
      Iri sender = e.args.contains("consumer") ? Iri(e.args["consumer"].get<std::string>()) : scenario.consumer;
      if (e.action == "skip-duty") {
        result.skipped.push_back(format_datetime(e.at) + " " + e.args.value("duty", std::string("?")));
        continue;
      }
      queue.push_back({e.action, e.at, sender, e.args});
    }
    while (!queue.empty()) {
      provider.handle(queue.front());
      queue.pop_front();
    }
    provider.tick(t);
    if (t == scenario.end) break;
  }

  result.log = provider.log();
  result.obligations = provider.obligations(scenario.end);
  result.revocations = provider.revocations();
  for (const auto& [id, n] : provider.negotiations()) result.negotiations.push_back(n);
  result.decisions = provider.decisions();
  result.illegal_transitions = provider.monitor().illegal();
  result.end = scenario.end;
  return result;
}

std::string report_json(const Scenario& scenario, const RunResult& r) {
  ojson j;
  j["scenario"] = scenario.name;
  j["start"] = format_datetime(scenario.start);
  j["end"] = format_datetime(r.end);
  ojson negs = ojson::array();
  for (const auto& n : r.negotiations) {
    ojson e{{"id", n.id}, {"phase", std::string(to_string(n.phase))}, {"offer", n.offer.uid.value}};
    if (n.agreement) e["agreement"] = n.agreement->uid.value;
    if (!n.reason.empty()) e["reason"] = n.reason;
    negs.push_back(e);
  }
  j["negotiations"] = negs;
  ojson decisions = ojson::array();
  for (const auto& d : r.decisions) {
    ojson e{{"at", format_datetime(d.at)},
            {"negotiation", d.offer},
            {"action", compact(d.action)},
            {"outcome", std::string(to_string(d.outcome))},
            {"enforcement", std::string(to_string(d.enforcement))},
            {"reason", d.reason}};
    if (d.usage_id) e["usage"] = *d.usage_id;
    decisions.push_back(e);
  }
  j["decisions"] = decisions;
  ojson obligations = ojson::array();
  for (const auto& [neg, s] : r.obligations) {
    ojson e = ojson::parse(obligation_to_json(s));
    e["negotiation"] = neg;
    obligations.push_back(e);
  }
  j["obligations"] = obligations;
  ojson revs = ojson::array();
  for (const auto& ev : r.revocations) {
    revs.push_back({{"usage", ev.usage_id},
                    {"actor", ev.actor.value},
                    {"target", ev.target.value},
                    {"at", format_datetime(ev.at)},
                    {"reason", ev.reason}});
  }
  j["revocations"] = revs;
  j["skipped"] = r.skipped;
  j["illegal_transitions"] = r.illegal_transitions;
  j["audit_records"] = r.log.size();
  return j.dump(2) + "\n";
}

void write_outputs(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  std::vector<Policy> agreements;
  for (const auto& n : result.negotiations) {
    if (n.agreement) agreements.push_back(*n.agreement);
  }
  write("report.json", report_json(scenario, result));
  write("audit.ndjson", result.log.to_ndjson());
  write("agreements.ttl", serialize(agreements));
}

}  // namespace dspolicy
