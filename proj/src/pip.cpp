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

#include "dspolicy/pip.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <deque>
#include <stdexcept>

#include "dspolicy/diag.hpp"
#include "json.hpp"

namespace dspolicy {

using nlohmann::json;

std::optional<TypedLiteral> get_attribute(const AttributeQuery& query, const ProviderList& providers) {
  for (const auto& p : providers) {
    if (!p) continue;
    if (auto v = p->get(query)) return v;
  }
  return std::nullopt;
}

std::optional<TypedLiteral> ClockProvider::get(const AttributeQuery& query) const {
  if (query.operand != odrl("dateTime")) return std::nullopt;
  return TypedLiteral{format_datetime(query.at), xsd("dateTime")};
}

Iri expand_name(std::string_view name) {
  static const std::pair<std::string_view, std::string_view> kPrefixes[] = {
      {"odrl", ns::kOdrl}, {"dsp", ns::kDsp}, {"xsd", ns::kXsd},   {"rdf", ns::kRdf},
      {"rdfs", ns::kRdfs}, {"sh", ns::kSh},   {"dc11", ns::kDc11},
  };
  if (name.find("://") == std::string_view::npos) {
    auto colon = name.find(':');
    if (colon != std::string_view::npos) {
      for (const auto& [prefix, base] : kPrefixes) {
        if (name.substr(0, colon) == prefix) {
          return Iri(std::string(base) + std::string(name.substr(colon + 1)));
        }
      }
    }
  }
  return canonical_profile_iri(Iri(std::string(name)));
}

void StaticAttributeProvider::set(const Iri& subject, const Iri& operand, TypedLiteral value) {
  values_[{subject, operand}] = std::move(value);
}

void StaticAttributeProvider::erase(const Iri& subject, const Iri& operand) {
  values_.erase({subject, operand});
}

std::optional<TypedLiteral> StaticAttributeProvider::get(const AttributeQuery& query) const {
  auto it = values_.find({query.subject, query.operand});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

StaticAttributeProvider StaticAttributeProvider::from_json(std::string_view text) {
  StaticAttributeProvider out;
  try {
    json doc = json::parse(text);
    for (const auto& [subject, attrs] : doc.items()) {
      for (const auto& [operand, v] : attrs.items()) {
        TypedLiteral lit;
        if (v.is_object()) {
          lit.lexical = v.at("value").get<std::string>();
          lit.datatype = expand_name(v.value("datatype", std::string("xsd:string")));
        } else if (v.is_string()) {
          lit.lexical = v.get<std::string>();
        } else {
          lit.lexical = v.dump();
        }
        out.set(Iri(subject), expand_name(operand), std::move(lit));
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("attribute fixture: ") + e.what());
  }
  return out;
}

std::optional<TypedLiteral> ConnectionCountProvider::get(const AttributeQuery& query) const {
  if (query.operand != dsp("concurrentConnections")) return std::nullopt;
  std::uint64_t total = 0;
  for (const auto& [key, c] : state_.usage) {
    if (key.assignee == query.subject) total += c.active_connections;
  }
  return TypedLiteral{std::to_string(total), xsd("integer")};
}

RegionHierarchy RegionHierarchy::from_json(std::string_view text) {
  RegionHierarchy h;
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw std::invalid_argument("region hierarchy must be a JSON object");
    for (const auto& [parent, kids] : doc.items()) {
      h.codes_.insert(parent);
      for (const auto& k : kids) h.add_child(parent, k.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("region hierarchy: ") + e.what());
  }
  return h;
}

void RegionHierarchy::add_child(const std::string& parent, const std::string& child) {
  codes_.insert(parent);
  codes_.insert(child);
  children_[parent].push_back(child);
}

bool RegionHierarchy::known(std::string_view code) const { return codes_.find(code) != codes_.end(); }

const std::vector<std::string>& RegionHierarchy::children(std::string_view code) const {
  static const std::vector<std::string> kNone;
  auto it = children_.find(code);
  return it == children_.end() ? kNone : it->second;
}

bool region_contains(std::string_view outer, std::string_view inner, const RegionHierarchy& hierarchy) {
  for (auto code : {outer, inner}) {
    if (!hierarchy.known(code)) {
      warn("unknown region code '" + std::string(code) + "'");
      return false;
    }
  }
  std::set<std::string, std::less<>> seen;
  std::deque<std::string> queue{std::string(outer)};
  while (!queue.empty()) {
    std::string code = std::move(queue.front());
    queue.pop_front();
    if (code == inner) return true;
    if (!seen.insert(code).second) continue;
    for (const auto& child : hierarchy.children(code)) queue.push_back(child);
  }
  return false;
}

namespace {

std::string mac_input(const Attestation& a) {
  std::string out;
  for (std::string_view f : {std::string_view(a.issuer.value), std::string_view(a.subject.value),
                             std::string_view(a.claim.value), std::string_view(a.value.lexical),
                             std::string_view(a.value.datatype.value)}) {
    out += std::to_string(f.size()) + ":" + std::string(f);
  }
  std::string exp = format_datetime(a.expires);
  return out + std::to_string(exp.size()) + ":" + exp;
}

std::string compute_tag(const Attestation& a, std::string_view key) {
  std::string msg = mac_input(a);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), digest, &len);
  std::string b64(4 * ((len + 2) / 3) + 1, '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(b64.data()), digest, static_cast<int>(len));
  b64.resize(static_cast<size_t>(n));
  return b64;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

}  // namespace

Attestation issue_attestation(Iri issuer, Iri subject, Iri claim, TypedLiteral value, Timestamp expires,
                              std::string_view key) {
  Attestation a{std::move(issuer), std::move(subject), std::move(claim), std::move(value), expires, {}};
  a.tag = compute_tag(a, key);
  return a;
}

VerifyResult verify_attestation(const Attestation& a, std::string_view issuer_key, Timestamp now) {
  if (!constant_time_equal(compute_tag(a, issuer_key), a.tag)) return {false, "bad tag"};
  if (now >= a.expires) return {false, "expired"};
  return {true, {}};
}

VerifyResult verify_attestation(const Attestation& a, const KeyRing& keys, Timestamp now) {
  auto it = keys.find(a.issuer);
  if (it == keys.end()) return {false, "unknown issuer"};
  return verify_attestation(a, it->second, now);
}

std::string attestation_to_json(const Attestation& a) {
  json j{{"issuer", a.issuer.value},
         {"subject", a.subject.value},
         {"claim", a.claim.value},
         {"value", {{"lexical", a.value.lexical}, {"datatype", a.value.datatype.value}}},
         {"expires", format_datetime(a.expires)},
         {"tag", a.tag}};
  return j.dump();
}

Attestation attestation_from_json(std::string_view line) {
  try {
    json j = json::parse(line);
    Attestation a;
    a.issuer = Iri(j.at("issuer").get<std::string>());
    a.subject = Iri(j.at("subject").get<std::string>());
    a.claim = expand_name(j.at("claim").get<std::string>());
    const json& v = j.at("value");
    a.value.lexical = v.at("lexical").get<std::string>();
    a.value.datatype = expand_name(v.value("datatype", std::string(ns::kXsd) + "string"));
    auto exp = parse_datetime(j.at("expires").get<std::string>());
    if (!exp) throw std::invalid_argument("attestation: bad expires");
    a.expires = *exp;
    a.tag = j.at("tag").get<std::string>();
    return a;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("attestation: ") + e.what());
  }
}

std::optional<TypedLiteral> AttestationProvider::get(const AttributeQuery& query) const {
  const Iri& wanted = (query.operand == dsp("attestedClaim") && query.qualifier) ? *query.qualifier : query.operand;
  for (const auto& a : attestations_) {
    if (a.subject != query.subject || a.claim != wanted) continue;
    if (verify_attestation(a, keys_, query.at)) return a.value;
  }
  return std::nullopt;
}

}  // namespace dspolicy
