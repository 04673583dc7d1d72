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

#include "dspolicy/vocab.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace dspolicy {

bool Iri::is_absolute() const {
  auto sep = value.find("://");
  if (sep == std::string::npos || sep == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(value[0]))) return false;
  for (size_t i = 1; i < sep; ++i) {
    char c = value[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  return sep + 3 < value.size();
}

Iri canonical_profile_iri(const Iri& iri) {
  if (iri.value.rfind(ns::kDspAlias, 0) == 0) {
    return Iri(std::string(ns::kDsp) + iri.value.substr(ns::kDspAlias.size()));
  }
  return iri;
}

std::string compact(const Iri& iri) {
  static const std::array<std::pair<std::string_view, std::string_view>, 5> kPrefixes = {{
      {"odrl", ns::kOdrl},
      {"dc11", ns::kDc11},
      {"xsd", ns::kXsd},
      {"rdf", ns::kRdf},
      {"dsp", ns::kDsp},
  }};
  for (const auto& [prefix, base] : kPrefixes) {
    if (iri.value.size() > base.size() && iri.value.compare(0, base.size(), base) == 0) {
      std::string_view local = std::string_view(iri.value).substr(base.size());
      bool simple = std::isalpha(static_cast<unsigned char>(local[0]));
      for (char c : local) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') simple = false;
      }
      if (simple) return std::string(prefix) + ":" + std::string(local);
    }
  }
  return "<" + iri.value + ">";
}

}  // namespace dspolicy
