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

#include "dspolicy/textio.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

namespace dspolicy {

ParseError::ParseError(SourceLocation location, std::string message, std::string snippet)
    : std::runtime_error(std::to_string(location.line) + ":" + std::to_string(location.column) +
                         ": " + message + (snippet.empty() ? "" : " near '" + snippet + "'")),
      location_(location),
      message_(std::move(message)),
      snippet_(std::move(snippet)) {}

namespace rdfg {

void Graph::add(Triple triple) {
  note_location(triple.subject, triple.where);
  if (!by_subject_.count(triple.subject)) subject_order_.push_back(triple.subject);
  by_subject_[triple.subject].push_back(triples_.size());
  triples_.push_back(std::move(triple));
}

void Graph::note_location(const Node& node, SourceLocation where) { first_seen_.emplace(node, where); }

std::vector<const Triple*> Graph::about(const Node& node) const {
  std::vector<const Triple*> out;
  auto it = by_subject_.find(node);
  if (it == by_subject_.end()) return out;
  for (size_t idx : it->second) out.push_back(&triples_[idx]);
  return out;
}

std::vector<Node> Graph::objects(const Node& subject, const Iri& predicate) const {
  std::vector<Node> out;
  for (const Triple* t : about(subject)) {
    if (t->predicate == predicate) out.push_back(t->object);
  }
  return out;
}

bool Graph::has_type(const Node& subject, const Iri& type) const {
  for (const auto& obj : objects(subject, rdf("type"))) {
    if (obj.is_iri() && obj.value == type.value) return true;
  }
  return false;
}

SourceLocation Graph::location_of(const Node& node) const {
  auto it = first_seen_.find(node);
  return it == first_seen_.end() ? SourceLocation{} : it->second;
}

}  // namespace rdfg

namespace {

using rdfg::Node;

enum class Tok {
  IriRef, PName, Blank, String, Integer, Decimal, Boolean, A, Prefix,
  Dot, Semi, Comma, LBracket, RBracket, Carets, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // decoded value
  std::string raw;   // source slice, for diagnostics
  SourceLocation loc;
};

constexpr int kMaxDepth = 128;

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':' || c == '%' || (static_cast<unsigned char>(c) >= 0x80);
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {
    SourceLocation loc;
    for (size_t i = 0; i + 1 < text.size(); ++i) {
      if (text[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
    }
    last_ = loc;
  }

  SourceLocation end_location() const { return last_; }

  Token next() {
    skip_space();
    Token tok;
    tok.loc = here();
    if (pos_ >= text_.size()) {
      tok.kind = Tok::End;
      tok.loc = last_;
      tok.raw = "<end of input>";
      return tok;
    }
    size_t start = pos_;
    char c = text_[pos_];
    switch (c) {
      case '<': read_iri(tok); break;
      case '"':
      case '\'': read_string(tok, c); break;
      case '.': single(tok, Tok::Dot); break;
      case ';': single(tok, Tok::Semi); break;
      case ',': single(tok, Tok::Comma); break;
      case '[': single(tok, Tok::LBracket); break;
      case ']': single(tok, Tok::RBracket); break;
      case '^':
        if (peek(1) != '^') fail(tok.loc, "expected '^^'", "^");
        advance(2);
        tok.kind = Tok::Carets;
        break;
      case '(':
      case ')': fail(tok.loc, "collections are not supported", std::string(1, c));
      case '@': read_directive(tok); break;
      case '_':
        if (peek(1) == ':') {
          read_blank(tok);
          break;
        }
        read_name(tok);
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
          read_number(tok);
        } else if (is_name_char(c)) {
          read_name(tok);
        } else {
          fail(tok.loc, "unexpected character", std::string(1, c));
        }
    }
    tok.raw = std::string(text_.substr(start, pos_ - start));
    return tok;
  }

  [[noreturn]] void fail(SourceLocation loc, std::string message, std::string snippet) const {
    throw ParseError(loc, std::move(message), std::move(snippet));
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  SourceLocation here() const { return {line_, col_}; }

  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void single(Token& tok, Tok kind) {
    tok.kind = kind;
    advance();
  }

  void read_iri(Token& tok) {
    advance();
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') fail(tok.loc, "unterminated IRI", "<" + value);
      char c = peek();
      if (c == '>') break;
      if (c == ' ' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`' || c == '\\' || static_cast<unsigned char>(c) < 0x20) {
        fail(here(), "malformed IRI", std::string(1, c));
      }
      value += c;
      advance();
    }
    advance();
    tok.kind = Tok::IriRef;
    tok.text = std::move(value);
  }

  void read_string(Token& tok, char quote) {
    if (peek(1) == quote && peek(2) == quote) {
      fail(tok.loc, "multi-line literals are not supported", std::string(3, quote));
    }
    advance();
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n' || peek() == '\r') {
        fail(tok.loc, "unterminated string literal", std::string(1, quote) + value);
      }
      char c = peek();
      if (c == quote) break;
      if (c == '\\') {
        SourceLocation esc = here();
        char e = peek(1);
        advance(2);
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          case 'b': value += '\b'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u':
          case 'U': {
            size_t n = e == 'u' ? 4 : 8;
            unsigned long cp = 0;
            for (size_t i = 0; i < n; ++i) {
              char h = peek();
              if (!std::isxdigit(static_cast<unsigned char>(h))) fail(esc, "malformed unicode escape", "\\" + std::string(1, e));
              cp = cp * 16 + static_cast<unsigned long>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : (std::tolower(h) - 'a' + 10));
              advance();
            }
            if (cp > 0x10FFFF) fail(esc, "malformed unicode escape", "\\" + std::string(1, e));
            append_utf8(value, cp);
            break;
          }
          default: fail(esc, "unknown escape sequence", "\\" + std::string(1, e));
        }
        continue;
      }
      value += c;
      advance();
    }
    advance();
    tok.kind = Tok::String;
    tok.text = std::move(value);
    if (peek() == '@') fail(here(), "language tags are not supported", "@");
  }

  void read_directive(Token& tok) {
    advance();
    std::string word;
    while (std::isalpha(static_cast<unsigned char>(peek()))) {
      word += peek();
      advance();
    }
    if (word == "prefix") {
      tok.kind = Tok::Prefix;
      return;
    }
    fail(tok.loc, "unsupported directive", "@" + word);
  }

  void read_blank(Token& tok) {
    advance(2);
    size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(peek()) && peek() != ':') advance();
    while (pos_ > start && text_[pos_ - 1] == '.') {
      --pos_;
      --col_;
    }
    if (pos_ == start) fail(tok.loc, "empty blank node label", "_:");
    tok.kind = Tok::Blank;
    tok.text = std::string(text_.substr(start, pos_ - start));
  }

  void read_number(Token& tok) {
    size_t start = pos_;
    if (peek() == '+' || peek() == '-') advance();
    size_t digits = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    bool decimal = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      decimal = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (pos_ == digits) fail(tok.loc, "malformed number", std::string(text_.substr(start, pos_ - start + 1)));
    if (peek() == 'e' || peek() == 'E') fail(here(), "exponent notation is not supported", "e");
    tok.kind = decimal ? Tok::Decimal : Tok::Integer;
    tok.text = std::string(text_.substr(start, pos_ - start));
  }

  void read_name(Token& tok) {
    size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(peek())) advance();
    while (pos_ > start + 1 && text_[pos_ - 1] == '.') {
      --pos_;
      --col_;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word == "a") {
      tok.kind = Tok::A;
    } else if (word == "true" || word == "false") {
      tok.kind = Tok::Boolean;
    } else if (word.find(':') != std::string::npos) {
      tok.kind = Tok::PName;
    } else {
      fail(tok.loc, "unexpected token", word);
    }
    tok.text = std::move(word);
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  SourceLocation last_;
};

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view text) : lex_(text) {}

  rdfg::Graph run() {
    advance();
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::Prefix) {
        directive();
      } else {
        triples();
        expect(Tok::Dot, "expected '.' after triples");
      }
    }
    return std::move(graph_);
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const Token& tok, std::string message) const {
    throw ParseError(tok.loc, std::move(message), tok.raw);
  }

  void expect(Tok kind, std::string message) {
    if (cur_.kind != kind) fail(cur_, std::move(message));
    advance();
  }

  void directive() {
    advance();
    if (cur_.kind != Tok::PName || cur_.text.back() != ':' ||
        cur_.text.find(':') != cur_.text.size() - 1) {
      fail(cur_, "expected prefix name ending in ':'");
    }
    std::string prefix = cur_.text.substr(0, cur_.text.size() - 1);
    advance();
    if (cur_.kind != Tok::IriRef) fail(cur_, "expected namespace IRI");
    prefixes_[prefix] = cur_.text;
    advance();
    expect(Tok::Dot, "expected '.' after @prefix directive");
  }

  std::string resolve(const Token& tok) const {
    size_t colon = tok.text.find(':');
    std::string prefix = tok.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail(tok, "undefined prefix '" + prefix + "'");
    return it->second + tok.text.substr(colon + 1);
  }

  void triples() {
    if (cur_.kind == Tok::LBracket) {
      Node subject = bracket(0);
      if (cur_.kind != Tok::Dot) predicate_object_list(subject, 0);
      return;
    }
    Node subject;
    switch (cur_.kind) {
      case Tok::IriRef: subject = {Node::Kind::Iri, cur_.text, {}}; break;
      case Tok::PName: subject = {Node::Kind::Iri, resolve(cur_), {}}; break;
      case Tok::Blank: subject = {Node::Kind::Blank, "b:" + cur_.text, {}}; break;
      default: fail(cur_, "expected subject");
    }
    graph_.note_location(subject, cur_.loc);
    advance();
    predicate_object_list(subject, 0);
  }

  Iri verb() {
    Iri out;
    switch (cur_.kind) {
      case Tok::A: out = rdf("type"); break;
      case Tok::IriRef: out = Iri(cur_.text); break;
      case Tok::PName: out = Iri(resolve(cur_)); break;
      default: fail(cur_, "expected predicate");
    }
    advance();
    return out;
  }

  void predicate_object_list(const Node& subject, int depth) {
    Iri predicate = verb();
    object_list(subject, predicate, depth);
    while (cur_.kind == Tok::Semi) {
      while (cur_.kind == Tok::Semi) advance();
      if (cur_.kind == Tok::Dot || cur_.kind == Tok::RBracket || cur_.kind == Tok::End) break;
      predicate = verb();
      object_list(subject, predicate, depth);
    }
  }

  void object_list(const Node& subject, const Iri& predicate, int depth) {
    while (true) {
      SourceLocation where = cur_.loc;
      Node obj = object(depth);
      graph_.add({subject, predicate, std::move(obj), where});
      if (cur_.kind != Tok::Comma) break;
      advance();
    }
  }

  Node object(int depth) {
    Node out;
    switch (cur_.kind) {
      case Tok::IriRef: out = {Node::Kind::Iri, cur_.text, {}}; break;
      case Tok::PName: out = {Node::Kind::Iri, resolve(cur_), {}}; break;
      case Tok::Blank:
        out = {Node::Kind::Blank, "b:" + cur_.text, {}};
        graph_.note_location(out, cur_.loc);
        break;
      case Tok::LBracket: return bracket(depth + 1);
      case Tok::String: {
        Token start = cur_;
        std::string lexical = cur_.text;
        advance();
        std::string datatype = std::string(ns::kXsd) + "string";
        if (cur_.kind == Tok::Carets) {
          advance();
          if (cur_.kind == Tok::IriRef) {
            datatype = cur_.text;
          } else if (cur_.kind == Tok::PName) {
            datatype = resolve(cur_);
          } else {
            fail(cur_, "expected datatype IRI after '^^'");
          }
          advance();
        }
        if (!literal_well_formed(TypedLiteral{lexical, Iri(datatype)})) {
          throw ParseError(start.loc, "malformed literal for datatype <" + datatype + ">", start.raw);
        }
        return {Node::Kind::Literal, std::move(lexical), std::move(datatype)};
      }
      case Tok::Integer: out = {Node::Kind::Literal, cur_.text, std::string(ns::kXsd) + "integer"}; break;
      case Tok::Decimal: out = {Node::Kind::Literal, cur_.text, std::string(ns::kXsd) + "decimal"}; break;
      case Tok::Boolean: out = {Node::Kind::Literal, cur_.text, std::string(ns::kXsd) + "boolean"}; break;
      default: fail(cur_, "expected object");
    }
    advance();
    return out;
  }

  Node bracket(int depth) {
    if (depth > kMaxDepth) fail(cur_, "nesting too deep");
    Token open = cur_;
    Node node{Node::Kind::Blank, "a:" + std::to_string(anon_++), {}};
    graph_.note_location(node, open.loc);
    advance();
    if (cur_.kind != Tok::RBracket) predicate_object_list(node, depth);
    if (cur_.kind != Tok::RBracket) {
      fail(cur_, "unbalanced brackets: expected ']' to close '[' at line " +
                     std::to_string(open.loc.line) + ", column " + std::to_string(open.loc.column));
    }
    advance();
    return node;
  }

  Lexer lex_;
  Token cur_;
  std::map<std::string, std::string> prefixes_;
  rdfg::Graph graph_;
  int anon_ = 0;
};

std::string describe(const Node& node) {
  if (node.is_iri()) return "<" + node.value + ">";
  if (node.is_blank()) {
    return node.value.rfind("b:", 0) == 0 ? "_:" + node.value.substr(2) : "[]";
  }
  return "\"" + node.value + "\"";
}

class PolicyReader {
 public:
  explicit PolicyReader(const rdfg::Graph& graph) : g_(graph) {}

  Document run() {
    Document doc;
    for (const Node& subject : g_.subjects()) {
      auto kind = policy_kind(subject);
      if (kind) doc.policies.push_back(policy(subject, *kind));
      if (subject.is_iri() && g_.has_type(subject, odrl("Asset"))) {
        Asset asset{Iri(subject.value), std::nullopt};
        for (const char* title : {"http://purl.org/dc/elements/1.1/title", "http://purl.org/dc/terms/title"}) {
          auto values = g_.objects(subject, Iri(title));
          if (!values.empty() && values.front().is_literal()) asset.title = values.front().value;
        }
        doc.assets.push_back(std::move(asset));
      }
    }
    return doc;
  }

 private:
  std::optional<PolicyKind> policy_kind(const Node& subject) const {
    if (g_.has_type(subject, odrl("Agreement"))) return PolicyKind::Agreement;
    if (g_.has_type(subject, odrl("Offer"))) return PolicyKind::Offer;
    if (g_.has_type(subject, odrl("Set")) || g_.has_type(subject, odrl("Policy"))) return PolicyKind::Set;
    return std::nullopt;
  }

  static bool is_policy_class(const Node& n) {
    return n.is_iri() && (n.value == odrl("Policy").value || n.value == odrl("Set").value ||
                          n.value == odrl("Offer").value || n.value == odrl("Agreement").value);
  }

  [[noreturn]] void fail_at(const Node& node, std::string message) const {
    throw ParseError(g_.location_of(node), std::move(message), describe(node));
  }

  [[noreturn]] void fail_at(const rdfg::Triple& t, std::string message) const {
    throw ParseError(t.where, std::move(message), describe(t.object));
  }

  std::vector<const rdfg::Triple*> defined(const Node& node, const rdfg::Triple* ref) const {
    auto props = g_.about(node);
    if (props.empty()) {
      std::string msg = node.is_blank() ? "blank node " + describe(node) + " is referenced but never defined"
                                        : "node " + describe(node) + " has no description";
      if (ref) fail_at(*ref, msg);
      fail_at(node, msg);
    }
    return props;
  }

  Iri iri_object(const rdfg::Triple& t, std::string_view what) const {
    if (!t.object.is_iri()) fail_at(t, std::string(what) + " must be an IRI");
    return Iri(t.object.value);
  }

  void set_once(std::optional<Iri>& slot, const rdfg::Triple& t, std::string_view what) const {
    if (slot) fail_at(t, "multiple values for " + std::string(what));
    slot = iri_object(t, what);
  }

  struct Guard {
    std::set<Node>& active;
    Node node;
    Guard(std::set<Node>& a, Node n, const PolicyReader& reader) : active(a), node(std::move(n)) {
      if (!active.insert(node).second) reader.fail_at(node, "cyclic reference to " + describe(node));
    }
    ~Guard() { active.erase(node); }
  };

  Policy policy(const Node& subject, PolicyKind kind) {
    Guard guard(active_, subject, *this);
    Policy out;
    out.kind = kind;
    std::optional<Iri> uid;
    if (subject.is_iri()) uid = Iri(subject.value);
    for (const rdfg::Triple* t : g_.about(subject)) {
      const Iri& p = t->predicate;
      if (p == rdf("type") && is_policy_class(t->object)) continue;
      if (p == odrl("uid")) {
        if (!subject.is_iri()) uid = iri_object(*t, "odrl:uid");
      } else if (p == odrl("profile")) {
        out.profiles.push_back(iri_object(*t, "odrl:profile"));
      } else if (p == odrl("permission")) {
        out.rules.push_back(rule(*t, RuleKind::Permission));
      } else if (p == odrl("prohibition")) {
        out.rules.push_back(rule(*t, RuleKind::Prohibition));
      } else if (p == odrl("obligation") || p == odrl("duty")) {
        out.rules.push_back(rule(*t, RuleKind::Duty));
      } else {
        out.annotations.push_back(annotation(*t));
      }
    }
    if (!uid) fail_at(subject, "policy has no uid");
    out.uid = *uid;
    return out;
  }

  Rule rule(const rdfg::Triple& ref, RuleKind kind) {
    const Node& node = ref.object;
    if (node.is_literal()) fail_at(ref, "expected a rule node");
    auto props = defined(node, &ref);
    Guard guard(active_, node, *this);
    Rule out;
    out.kind = kind;
    bool has_action = false;
    for (const rdfg::Triple* t : props) {
      const Iri& p = t->predicate;
      if (p == rdf("type")) {
        if (t->object.is_iri() && t->object.value.rfind(ns::kOdrl, 0) == 0) continue;
        out.annotations.push_back(annotation(*t));
      } else if (p == odrl("target")) {
        set_once(out.target, *t, "odrl:target");
      } else if (p == odrl("assigner")) {
        set_once(out.assigner, *t, "odrl:assigner");
      } else if (p == odrl("assignee")) {
        set_once(out.assignee, *t, "odrl:assignee");
      } else if (p == odrl("action")) {
        if (has_action) fail_at(*t, "multiple values for odrl:action");
        out.action = action(*t);
        has_action = true;
      } else if (p == odrl("constraint")) {
        out.constraints.push_back(constraint(*t));
      } else if (p == odrl("duty") || p == odrl("obligation")) {
        out.duties.push_back(rule(*t, RuleKind::Duty));
      } else {
        out.annotations.push_back(annotation(*t));
      }
    }
    if (!has_action) fail_at(ref, "rule has no odrl:action");
    return out;
  }

  ActionExpression action(const rdfg::Triple& ref) {
    const Node& node = ref.object;
    if (node.is_literal()) fail_at(ref, "odrl:action must be an IRI or an action node");
    if (node.is_iri() && g_.about(node).empty()) return ActionExpression(Iri(node.value));
    auto props = defined(node, &ref);
    Guard guard(active_, node, *this);
    ActionExpression out;
    std::optional<Iri> value;
    for (const rdfg::Triple* t : props) {
      if (t->predicate == rdf("value")) {
        set_once(value, *t, "rdf:value");
      } else if (t->predicate == odrl("refinement")) {
        out.refinements.push_back(constraint(*t));
      }
    }
    if (!value) {
      if (node.is_iri()) return ActionExpression(Iri(node.value), std::move(out.refinements));
      fail_at(ref, "action node has no rdf:value");
    }
    out.action = *value;
    return out;
  }

  Constraint constraint(const rdfg::Triple& ref) {
    const Node& node = ref.object;
    if (node.is_literal()) fail_at(ref, "expected a constraint node");
    auto props = defined(node, &ref);
    Constraint out;
    std::optional<Iri> left, op;
    std::optional<Term> right;
    for (const rdfg::Triple* t : props) {
      const Iri& p = t->predicate;
      if (p == odrl("leftOperand")) {
        set_once(left, *t, "odrl:leftOperand");
      } else if (p == odrl("operator")) {
        set_once(op, *t, "odrl:operator");
      } else if (p == odrl("rightOperand") || p == odrl("rightOperandReference")) {
        if (right) fail_at(*t, "multiple values for odrl:rightOperand");
        if (t->object.is_blank()) fail_at(*t, "right operand must be an IRI or a literal");
        if (t->object.is_iri()) {
          right = Iri(t->object.value);
        } else {
          right = TypedLiteral{t->object.value, Iri(t->object.datatype)};
        }
      } else if (p == odrl("unit")) {
        set_once(out.unit, *t, "odrl:unit");
      }
    }
    if (!left) fail_at(ref, "constraint has no odrl:leftOperand");
    if (!op) fail_at(ref, "constraint has no odrl:operator");
    if (!right) fail_at(ref, "constraint has no odrl:rightOperand");
    out.left_operand = *left;
    out.op = *op;
    out.right_operand = *right;
    return out;
  }

  Annotation annotation(const rdfg::Triple& t) {
    Annotation out;
    out.predicate = t.predicate;
    if (t.object.is_iri()) {
      out.value = Iri(t.object.value);
    } else if (t.object.is_literal()) {
      out.value = TypedLiteral{t.object.value, Iri(t.object.datatype)};
    } else {
      auto props = g_.about(t.object);
      if (props.empty() && t.object.value.rfind("b:", 0) == 0) {
        fail_at(t, "blank node " + describe(t.object) + " is referenced but never defined");
      }
      Guard guard(active_, t.object, *this);
      for (const rdfg::Triple* inner : props) out.nested.push_back(annotation(*inner));
    }
    return out;
  }

  const rdfg::Graph& g_;
  std::set<Node> active_;
};

// --- serialization ---------------------------------------------------------

struct Prop {
  std::string predicate;
  std::string object;  // used when nested is empty and !blank
  bool blank = false;
  std::vector<Prop> nested;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string term_text(const Term& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) return compact(*iri);
  const auto& lit = std::get<TypedLiteral>(term);
  if (lit.datatype == xsd("string")) return quote(lit.lexical);
  return quote(lit.lexical) + "^^" + compact(lit.datatype);
}

Prop leaf(std::string predicate, std::string object) {
  return Prop{std::move(predicate), std::move(object), false, {}};
}

Prop blank(std::string predicate, std::vector<Prop> nested) {
  return Prop{std::move(predicate), {}, true, std::move(nested)};
}

template <typename T, typename Key>
std::vector<T> sorted(std::vector<T> items, Key key) {
  std::vector<std::pair<std::string, size_t>> order;
  for (size_t i = 0; i < items.size(); ++i) order.emplace_back(key(items[i]), i);
  std::sort(order.begin(), order.end());
  std::vector<T> out;
  out.reserve(items.size());
  for (const auto& [k, i] : order) out.push_back(std::move(items[i]));
  return out;
}

std::vector<Constraint> sorted_constraints(const std::vector<Constraint>& cs) {
  return sorted(cs, [](const Constraint& c) { return c.left_operand.value + '\x01' + fingerprint(c); });
}

std::vector<Prop> annotation_props(const std::vector<Annotation>& annotations) {
  std::vector<Prop> out;
  auto ordered = sorted(annotations, [](const Annotation& a) {
    return a.predicate.value + '\x01' + fingerprint(a);
  });
  for (const auto& a : ordered) {
    std::string pred = a.predicate == rdf("type") ? "a" : compact(a.predicate);
    if (a.value) {
      out.push_back(leaf(pred, term_text(*a.value)));
    } else {
      out.push_back(blank(pred, annotation_props(a.nested)));
    }
  }
  return out;
}

std::vector<Prop> constraint_props(const Constraint& c) {
  std::vector<Prop> out{leaf("a", "odrl:Constraint"), leaf("odrl:leftOperand", compact(c.left_operand)),
                        leaf("odrl:operator", compact(c.op)),
                        leaf("odrl:rightOperand", term_text(c.right_operand))};
  if (c.unit) out.push_back(leaf("odrl:unit", compact(*c.unit)));
  return out;
}

std::vector<Rule> sorted_rules(const std::vector<Rule>& rules) {
  return sorted(rules, [](const Rule& r) {
    return std::to_string(static_cast<int>(r.kind)) + '\x01' + (r.target ? "1" + r.target->value : "0") +
           '\x01' + fingerprint(r);
  });
}

std::vector<Prop> rule_props(const Rule& r) {
  std::vector<Prop> out{leaf("a", "odrl:" + std::string(to_string(r.kind)))};
  if (r.target) out.push_back(leaf("odrl:target", compact(*r.target)));
  if (r.assigner) out.push_back(leaf("odrl:assigner", compact(*r.assigner)));
  if (r.assignee) out.push_back(leaf("odrl:assignee", compact(*r.assignee)));
  if (r.action.refinements.empty()) {
    out.push_back(leaf("odrl:action", compact(r.action.action)));
  } else {
    std::vector<Prop> action{leaf("a", "odrl:Action"), leaf("rdf:value", compact(r.action.action))};
    for (const auto& c : sorted_constraints(r.action.refinements)) {
      action.push_back(blank("odrl:refinement", constraint_props(c)));
    }
    out.push_back(blank("odrl:action", std::move(action)));
  }
  for (const auto& c : sorted_constraints(r.constraints)) {
    out.push_back(blank("odrl:constraint", constraint_props(c)));
  }
  for (const auto& d : sorted_rules(r.duties)) out.push_back(blank("odrl:duty", rule_props(d)));
  for (auto& a : annotation_props(r.annotations)) out.push_back(std::move(a));
  return out;
}

void emit(std::string& out, const std::vector<Prop>& props, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  for (size_t i = 0; i < props.size(); ++i) {
    const Prop& p = props[i];
    out += pad + p.predicate + " ";
    if (!p.blank) {
      out += p.object;
    } else if (p.nested.empty()) {
      out += "[]";
    } else {
      out += "[\n";
      emit(out, p.nested, indent + 2);
      out += "\n" + pad + "]";
    }
    if (i + 1 < props.size()) out += " ;\n";
  }
}

std::string policy_body(const Policy& policy) {
  std::vector<Prop> props{leaf("a", "odrl:" + std::string(to_string(policy.kind)))};
  auto profiles = policy.profiles;
  std::sort(profiles.begin(), profiles.end());
  for (const auto& p : profiles) props.push_back(leaf("odrl:profile", compact(p)));
  for (const auto& r : sorted_rules(policy.rules)) {
    const char* pred = r.kind == RuleKind::Permission    ? "odrl:permission"
                       : r.kind == RuleKind::Prohibition ? "odrl:prohibition"
                                                         : "odrl:obligation";
    props.push_back(blank(pred, rule_props(r)));
  }
  for (auto& a : annotation_props(policy.annotations)) props.push_back(std::move(a));
  std::string out = compact(policy.uid) + "\n";
  emit(out, props, 2);
  return out + " .\n";
}

}  // namespace

rdfg::Graph parse_turtle(std::string_view text) { return TurtleReader(text).run(); }

Document parse_document(std::string_view text) {
  rdfg::Graph graph = parse_turtle(text);
  return PolicyReader(graph).run();
}

std::vector<Policy> parse(std::string_view text) { return parse_document(text).policies; }

std::string_view prefix_block() {
  static const std::string block =
      "@prefix odrl: <" + std::string(ns::kOdrl) + "> .\n" +
      "@prefix dc11: <" + std::string(ns::kDc11) + "> .\n" +
      "@prefix xsd: <" + std::string(ns::kXsd) + "> .\n" +
      "@prefix rdf: <" + std::string(ns::kRdf) + "> .\n" +
      "@prefix dsp: <" + std::string(ns::kDsp) + "> .\n";
  return block;
}

std::string serialize(const Policy& policy) { return serialize(std::vector<Policy>{policy}); }

std::string serialize(const std::vector<Policy>& policies) {
  std::string out(prefix_block());
  auto ordered = sorted(policies, [](const Policy& p) { return p.uid.value + '\x01' + fingerprint(p); });
  for (const auto& p : ordered) out += "\n" + policy_body(p);
  return out;
}

}  // namespace dspolicy
