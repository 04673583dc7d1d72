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

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/model.hpp"
#include "json.hpp"

namespace dspolicy {

enum class EnforcementClass { Preventive, Detective };
enum class PatternSource { Literature, SelfDefined };
enum class ParamType { Iri, String, Integer, Decimal, DateTime, Duration, PolicyKind };

std::string_view to_string(EnforcementClass c);
std::string_view to_string(PatternSource s);
std::string_view to_string(ParamType t);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::String;
  bool required = false;
};

struct PatternDescriptor {
  std::string id;
  std::string name;
  std::string description;
  std::set<PartyRole> pip_roles;
  PartyRole pap_pdp_role = PartyRole::Provider;
  EnforcementClass enforcement_class = EnforcementClass::Preventive;
  PatternSource source = PatternSource::Literature;
  std::vector<ParamSpec> parameter_schema;
  /// How the pattern is written in ODRL.
  std::string encoding;
};

class PatternError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Params = nlohmann::json;

/// The 22 catalog entries in table order.
const std::vector<PatternDescriptor>& list_patterns();
/// Throws PatternError for unknown ids.
const PatternDescriptor& find_pattern(std::string_view id);

/// One JSON object per descriptor.
std::string descriptor_to_json(const PatternDescriptor& d);
/// Markdown reference table of the whole catalog.
std::string catalog_markdown();

/// Instantiates a pattern. `params` is a JSON object; an optional "with" array
/// of {"pattern": id, ...} objects composes further patterns onto the same
/// policy, inheriting the outer parties, target, uid and kind.
/// Throws PatternError naming the offending parameter.
Policy instantiate(std::string_view id, const Params& params);

/// Ids whose template shape matches some rule of `policy`, in catalog order.
std::vector<std::string> classify(const Policy& policy);

}  // namespace dspolicy
