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

#include "dspolicy/profile.hpp"

#include <cstdlib>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dspolicy/textio.hpp"

namespace dspolicy {
namespace detail {
extern const std::string_view kBuiltinProfile;
}

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Action: return "Action";
    case TermKind::LeftOperand: return "LeftOperand";
    case TermKind::RightOperand: return "RightOperand";
    case TermKind::Operator: return "Operator";
    case TermKind::Class: return "Class";
    case TermKind::Property: return "Property";
  }
  return "?";
}

const ProfileRegistry& ProfileRegistry::builtin() {
  static const ProfileRegistry registry = from_turtle(detail::kBuiltinProfile);
  return registry;
}

std::string_view ProfileRegistry::builtin_source() { return detail::kBuiltinProfile; }

ProfileRegistry ProfileRegistry::from_turtle(std::string_view text) {
  const std::pair<Iri, TermKind> kinds[] = {
      {odrl("Action"), TermKind::Action},         {odrl("LeftOperand"), TermKind::LeftOperand},
      {odrl("RightOperand"), TermKind::RightOperand}, {odrl("Operator"), TermKind::Operator},
      {rdfs("Class"), TermKind::Class},           {rdf("Property"), TermKind::Property},
  };
  rdfg::Graph graph = parse_turtle(text);
  ProfileRegistry out;
  for (const auto& subject : graph.subjects()) {
    if (!subject.is_iri()) continue;
    std::optional<TermKind> kind;
    for (const auto& [type, k] : kinds) {
      if (graph.has_type(subject, type)) kind = k;
    }
    if (!kind) continue;
    TermInfo info;
    info.iri = canonical_profile_iri(Iri(subject.value));
    info.kind = *kind;
    for (const auto& obj : graph.objects(subject, rdfs("isDefinedBy"))) {
      if (obj.is_iri()) info.defining_profile = canonical_profile_iri(Iri(obj.value));
    }
    if (info.defining_profile.empty()) {
      const std::string& v = info.iri.value;
      if (v.rfind(ns::kDsp, 0) == 0) {
        info.defining_profile = dsp_profile();
      } else if (v.rfind(ns::kOdrl, 0) == 0) {
        info.defining_profile = odrl_core_profile();
      } else {
        info.defining_profile = Iri(v.substr(0, v.find_last_of("#/") + 1));
      }
    }
    for (const auto& obj : graph.objects(subject, rdfs("range"))) {
      if (obj.is_iri()) info.expected_datatype = Iri(obj.value);
    }
    for (const auto& obj : graph.objects(subject, odrl("includedIn"))) {
      if (obj.is_iri()) info.included_in.push_back(canonical_profile_iri(Iri(obj.value)));
    }
    for (const auto& obj : graph.objects(subject, rdfs("comment"))) {
      if (obj.is_literal()) info.comment = obj.value;
    }
    out.add(std::move(info));
  }
  return out;
}

ProfileRegistry ProfileRegistry::from_environment() {
  const char* path = std::getenv("DSP_PROFILE");
  if (path == nullptr || *path == '\0') return builtin();
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open profile file ") + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_turtle(buffer.str());
}

std::optional<TermInfo> ProfileRegistry::resolve(const Iri& iri) const {
  auto it = terms_.find(canonical_profile_iri(iri));
  if (it == terms_.end()) return std::nullopt;
  return it->second;
}

std::vector<TermInfo> ProfileRegistry::registered_terms() const {
  std::vector<TermInfo> out;
  out.reserve(terms_.size());
  for (const auto& [iri, info] : terms_) out.push_back(info);
  return out;
}

bool ProfileRegistry::is_kind(const Iri& iri, TermKind kind) const {
  auto it = terms_.find(canonical_profile_iri(iri));
  return it != terms_.end() && it->second.kind == kind;
}

bool ProfileRegistry::subsumes(const Iri& broader, const Iri& narrower) const {
  Iri goal = canonical_profile_iri(broader);
  std::deque<Iri> queue{canonical_profile_iri(narrower)};
  std::set<Iri> seen;
  while (!queue.empty()) {
    Iri current = queue.front();
    queue.pop_front();
    if (current == goal) return true;
    if (!seen.insert(current).second) continue;
    auto it = terms_.find(current);
    if (it == terms_.end()) continue;
    for (const auto& parent : it->second.included_in) queue.push_back(parent);
  }
  return false;
}

void ProfileRegistry::add(TermInfo info) {
  Iri key = info.iri;
  terms_.insert_or_assign(std::move(key), std::move(info));
}

}  // namespace dspolicy
