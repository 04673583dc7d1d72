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

#pragma once

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace dspolicy {

/// Absolute IRI. Construction does not validate; see is_absolute().
struct Iri {
  std::string value;

  Iri() = default;
  explicit Iri(std::string v) : value(std::move(v)) {}

  bool empty() const { return value.empty(); }
  /// True when the IRI carries a "scheme://" separator.
  bool is_absolute() const;

  auto operator<=>(const Iri&) const = default;
  bool operator==(const Iri&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Iri& iri) {
  return os << '<' << iri.value << '>';
}

namespace ns {
inline constexpr std::string_view kOdrl = "http://www.w3.org/ns/odrl/2/";
inline constexpr std::string_view kDc11 = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kDsp = "http://www.w3id.org/dataspaces-policies/";
// Alternate spelling of the data-spaces profile namespace.
inline constexpr std::string_view kDspAlias = "https://w3id.org/dataspaces-policies/";
inline constexpr std::string_view kSh = "http://www.w3.org/ns/shacl#";
}  // namespace ns

inline Iri odrl(std::string_view local) { return Iri(std::string(ns::kOdrl) + std::string(local)); }
inline Iri xsd(std::string_view local) { return Iri(std::string(ns::kXsd) + std::string(local)); }
inline Iri rdf(std::string_view local) { return Iri(std::string(ns::kRdf) + std::string(local)); }
inline Iri rdfs(std::string_view local) { return Iri(std::string(ns::kRdfs) + std::string(local)); }
inline Iri dsp(std::string_view local) { return Iri(std::string(ns::kDsp) + std::string(local)); }
inline Iri sh(std::string_view local) { return Iri(std::string(ns::kSh) + std::string(local)); }

/// Rewrites the alias spelling of the data-spaces namespace to the canonical one.
Iri canonical_profile_iri(const Iri& iri);

/// The data-spaces profile IRI and the ODRL core profile IRI.
inline Iri dsp_profile() { return Iri(std::string(ns::kDsp)); }
inline Iri odrl_core_profile() { return odrl("core"); }

/// Shortens an IRI to "prefix:local" using the standard prefix block, or
/// returns it in angle brackets. Used for diagnostics.
std::string compact(const Iri& iri);

}  // namespace dspolicy

template <>
struct std::hash<dspolicy::Iri> {
  size_t operator()(const dspolicy::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.value);
  }
};
