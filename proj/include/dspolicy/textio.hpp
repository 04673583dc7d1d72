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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dspolicy/model.hpp"

namespace dspolicy {

struct SourceLocation {
  int line = 1;
  int column = 1;

  bool operator==(const SourceLocation&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLocation location, std::string message, std::string snippet);

  const SourceLocation& location() const { return location_; }
  const std::string& message() const { return message_; }
  const std::string& snippet() const { return snippet_; }

 private:
  SourceLocation location_;
  std::string message_;
  std::string snippet_;
};

/// RDF graph produced by the Turtle reader. Blank nodes from labels and from
/// anonymous brackets live in separate label spaces.
namespace rdfg {

struct Node {
  enum class Kind { Iri, Blank, Literal };
  Kind kind = Kind::Iri;
  std::string value;
  /// Datatype IRI, literals only.
  std::string datatype;

  bool is_iri() const { return kind == Kind::Iri; }
  bool is_blank() const { return kind == Kind::Blank; }
  bool is_literal() const { return kind == Kind::Literal; }
  auto operator<=>(const Node&) const = default;
};

struct Triple {
  Node subject;
  Iri predicate;
  Node object;
  /// Location of the object token.
  SourceLocation where;
};

class Graph {
 public:
  void add(Triple triple);
  void note_location(const Node& node, SourceLocation where);

  const std::vector<Triple>& triples() const { return triples_; }
  /// Triples whose subject is `node`, in document order.
  std::vector<const Triple*> about(const Node& node) const;
  std::vector<Node> objects(const Node& subject, const Iri& predicate) const;
  bool has_type(const Node& subject, const Iri& type) const;
  /// Subjects in order of first appearance.
  const std::vector<Node>& subjects() const { return subject_order_; }
  SourceLocation location_of(const Node& node) const;

 private:
  std::vector<Triple> triples_;
  std::map<Node, std::vector<size_t>> by_subject_;
  std::vector<Node> subject_order_;
  std::map<Node, SourceLocation> first_seen_;
};

}  // namespace rdfg

/// Reads the Turtle subset: @prefix, prefixed names, <IRIs>, _:labels, [ ... ],
/// ',' and ';' lists, "..." literals with optional ^^datatype, bare numbers and
/// booleans, the `a` keyword, and # comments.
rdfg::Graph parse_turtle(std::string_view text);

struct Document {
  std::vector<Policy> policies;
  std::vector<Asset> assets;
};

Document parse_document(std::string_view text);

/// Every subject typed odrl:Policy (or Set/Offer/Agreement) as a Policy.
std::vector<Policy> parse(std::string_view text);

/// Canonical, deterministic Turtle with the fixed prefix block.
std::string serialize(const Policy& policy);
std::string serialize(const std::vector<Policy>& policies);

/// The canonical prefix block, one @prefix line per namespace.
std::string_view prefix_block();

}  // namespace dspolicy
