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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dspolicy/textio.hpp"

namespace dspolicy::testing {

inline std::string data_path(const std::string& name) { return std::string(DSPOLICY_DATA_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline const Iri kProvider("https://www.example.com/provider");
inline const Iri kConsumer("https://www.example.com/consumer");
inline const Iri kFile1("http://example.com/files/file1");

/// Listing 1 with its class switched to Agreement.
inline Policy listing1_agreement() {
  Policy p = parse(read_fixture("listing1.ttl")).at(0);
  p.kind = PolicyKind::Agreement;
  return p;
}

}  // namespace dspolicy::testing
