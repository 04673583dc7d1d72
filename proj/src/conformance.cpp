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

#include <stdexcept>

#include "dspolicy/pdp.hpp"
#include "dspolicy/textio.hpp"
#include "json.hpp"

namespace dspolicy {

using nlohmann::json;

namespace {

std::string_view local_name(std::string_view iri) {
  auto cut = iri.find_last_of("#/:");
  return cut == std::string_view::npos ? iri : iri.substr(cut + 1);
}

const json* lookup(const json& record, const Iri& path) {
  if (auto it = record.find(path.value); it != record.end()) return &*it;
  if (auto it = record.find(std::string(local_name(path.value))); it != record.end()) return &*it;
  return nullptr;
}

bool value_has_datatype(const json& v, const Iri& dt) {
  if (dt == xsd("string")) return v.is_string();
  if (dt == xsd("boolean")) return v.is_boolean();
  if (dt == xsd("integer") || dt == xsd("int") || dt == xsd("long")) return v.is_number_integer();
  if (dt == xsd("nonNegativeInteger")) return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
  if (dt == xsd("decimal") || dt == xsd("double") || dt == xsd("float")) return v.is_number();
  if (dt == xsd("dateTime")) return v.is_string() && parse_datetime(v.get<std::string>()).has_value();
  if (dt == xsd("duration")) return v.is_string() && parse_duration(v.get<std::string>()).has_value();
  return true;
}

bool record_conforms(const json& record, const std::vector<PropertyShape>& props) {
  if (!record.is_object()) return false;
  for (const auto& p : props) {
    const json* v = lookup(record, p.path);
    std::vector<const json*> values;
    if (v && v->is_array()) {
      for (const auto& e : *v) values.push_back(&e);
    } else if (v && !v->is_null()) {
      values.push_back(v);
    }
    if (values.size() < p.min_count) return false;
    if (p.max_count && values.size() > *p.max_count) return false;
    if (p.datatype) {
      for (const json* e : values) {
        if (!value_has_datatype(*e, *p.datatype)) return false;
      }
    }
  }
  return true;
}

std::uint64_t count_of(const rdfg::Node& n) {
  auto d = Decimal::parse(n.value);
  if (!n.is_literal() || !d || d->units() < 0 || d->units() % Decimal::kScale != 0) {
    throw std::invalid_argument("shape: bad cardinality '" + n.value + "'");
  }
  return static_cast<std::uint64_t>(d->units() / Decimal::kScale);
}

}  // namespace

void ConformanceRegistry::add(const Iri& shape, std::shared_ptr<const ConformanceChecker> checker) {
  checkers_[shape] = std::move(checker);
}

const ConformanceChecker* ConformanceRegistry::find(const Iri& shape) const {
  auto it = checkers_.find(shape);
  return it == checkers_.end() ? nullptr : it->second.get();
}

bool check_conformance(std::string_view asset_data, const Iri& shape, const ConformanceRegistry& checkers) {
  const ConformanceChecker* checker = checkers.find(shape);
  if (!checker) throw NoChecker(shape);
  return checker->check(asset_data, shape);
}

std::shared_ptr<MinimalShapeChecker> MinimalShapeChecker::from_turtle(std::string_view text) {
  rdfg::Graph g = parse_turtle(text);
  auto out = std::make_shared<MinimalShapeChecker>();
  for (const auto& subject : g.subjects()) {
    if (!subject.is_iri() || !g.has_type(subject, sh("NodeShape"))) continue;
    auto& props = out->shapes_[Iri(subject.value)];
    for (const auto& p : g.objects(subject, sh("property"))) {
      PropertyShape ps;
      auto paths = g.objects(p, sh("path"));
      if (paths.size() != 1 || !paths[0].is_iri()) throw std::invalid_argument("shape: property needs one sh:path");
      ps.path = Iri(paths[0].value);
      for (const auto& n : g.objects(p, sh("minCount"))) ps.min_count = count_of(n);
      for (const auto& n : g.objects(p, sh("maxCount"))) ps.max_count = count_of(n);
      for (const auto& n : g.objects(p, sh("datatype"))) ps.datatype = Iri(n.value);
      props.push_back(std::move(ps));
    }
  }
  return out;
}

bool MinimalShapeChecker::check(std::string_view data, const Iri& shape) const {
  auto it = shapes_.find(shape);
  if (it == shapes_.end()) throw NoChecker(shape);
  json doc = json::parse(data, nullptr, false);
  if (doc.is_discarded()) return false;
  if (doc.is_array()) {
    for (const auto& rec : doc) {
      if (!record_conforms(rec, it->second)) return false;
    }
    return true;
  }
  return record_conforms(doc, it->second);
}

std::vector<Iri> MinimalShapeChecker::shapes() const {
  std::vector<Iri> out;
  for (const auto& [iri, _] : shapes_) out.push_back(iri);
  return out;
}

const std::vector<PropertyShape>* MinimalShapeChecker::properties(const Iri& shape) const {
  auto it = shapes_.find(shape);
  return it == shapes_.end() ? nullptr : &it->second;
}

void MinimalShapeChecker::register_all(ConformanceRegistry& registry) const {
  auto self = shared_from_this();
  for (const auto& [iri, _] : shapes_) registry.add(iri, self);
}

}  // namespace dspolicy
