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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/vocab.hpp"

namespace dspolicy {

enum class TermKind { Action, LeftOperand, RightOperand, Operator, Class, Property };
std::string_view to_string(TermKind kind);

struct TermInfo {
  Iri iri;
  TermKind kind = TermKind::Class;
  std::optional<Iri> expected_datatype;
  Iri defining_profile;
  /// Broader actions (odrl:includedIn), direct parents only.
  std::vector<Iri> included_in;
  std::string comment;

  bool operator==(const TermInfo&) const = default;
};

/// Vocabulary registry: ODRL core/common terms used by the pattern catalog plus
/// the data-spaces profile extension. Immutable after construction.
class ProfileRegistry {
 public:
  ProfileRegistry() = default;

  /// Compiled-in default profile.
  static const ProfileRegistry& builtin();
  /// Profile source text of the compiled-in default (Turtle).
  static std::string_view builtin_source();
  /// Loads a profile definition written in the supported Turtle subset.
  /// Throws ParseError on malformed input.
  static ProfileRegistry from_turtle(std::string_view text);
  /// Builtin registry, or the file named by DSP_PROFILE when set.
  static ProfileRegistry from_environment();

  /// nullopt means Unknown. Alias spellings of the dsp namespace resolve to
  /// the canonical term.
  std::optional<TermInfo> resolve(const Iri& iri) const;
  /// Sorted ascending by IRI.
  std::vector<TermInfo> registered_terms() const;

  bool is_kind(const Iri& iri, TermKind kind) const;
  /// True when `narrower` equals `broader` or reaches it through includedIn.
  bool subsumes(const Iri& broader, const Iri& narrower) const;

  void add(TermInfo info);

 private:
  std::map<Iri, TermInfo> terms_;
};

}  // namespace dspolicy
