/*
 * Copyright 2026 The Protoforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "protoforge/ontology.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

namespace protoforge::onto {

namespace {

constexpr std::array<std::pair<LiteralKind, std::string_view>, 7> kLiteralTokens{{
    {LiteralKind::Natural, "lit:natural"},
    {LiteralKind::Text, "lit:text"},
    {LiteralKind::Bytes, "lit:bytes"},
    {LiteralKind::AlgRef, "lit:algref"},
    {LiteralKind::KeyRef, "lit:keyref"},
    {LiteralKind::ModuleRef, "lit:moduleref"},
    {LiteralKind::TypeTag, "lit:typetag"},
}};

std::string range_key(const OntologyModel& m, const Range& r) {
  if (const auto* c = std::get_if<ConceptRef>(&r)) return m.concept_name(*c);
  return std::string(to_token(std::get<LiteralKind>(r)));
}

}  // namespace

std::string_view to_token(LiteralKind kind) noexcept {
  for (const auto& [k, t] : kLiteralTokens) {
    if (k == kind) return t;
  }
  return "lit:?";
}

std::optional<LiteralKind> literal_from_token(std::string_view token) noexcept {
  for (const auto& [k, t] : kLiteralTokens) {
    if (t == token) return k;
  }
  return std::nullopt;
}

OntologyModel::OntologyModel() : data_(std::make_shared<const detail::ModelData>()) {}

std::optional<ConceptRef> OntologyModel::find(std::string_view name) const {
  const auto it = data_->byName.find(std::string(name));
  if (it == data_->byName.end()) return std::nullopt;
  return ConceptRef{it->second};
}

ConceptRef OntologyModel::require(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw Error(Errc::UnknownConcept, "no concept named '" + std::string(name) + "'");
}

const ConceptDecl& OntologyModel::concept_decl(ConceptRef c) const {
  if (c.index >= data_->concepts.size()) {
    throw Error(Errc::UnknownConcept, "concept ref " + std::to_string(c.index) + " out of range");
  }
  return data_->concepts[c.index];
}

const PropertyDecl& OntologyModel::property(PropertyId p) const {
  const auto it = data_->byId.find(p.value);
  if (it == data_->byId.end()) {
    throw Error(Errc::UnknownProperty, "no property with id " + std::to_string(p.value));
  }
  return data_->properties[it->second];
}

std::span<const PropertyId> OntologyModel::prop(ConceptRef c) const {
  static_cast<void>(concept_decl(c));
  return data_->props[c.index];
}

std::span<const ConceptRef> OntologyModel::subcon(ConceptRef c) const {
  static_cast<void>(concept_decl(c));
  return data_->children[c.index];
}

std::vector<ConceptRef> OntologyModel::descendants(ConceptRef c) const {
  std::vector<ConceptRef> out;
  std::vector<ConceptRef> stack(subcon(c).rbegin(), subcon(c).rend());
  while (!stack.empty()) {
    const auto next = stack.back();
    stack.pop_back();
    out.push_back(next);
    const auto kids = data_->children[next.index];
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return out;
}

bool OntologyModel::is_descendant(ConceptRef c, ConceptRef ancestor) const {
  auto p = parent(c);
  while (p) {
    if (*p == ancestor) return true;
    p = parent(*p);
  }
  return false;
}

std::vector<PropertyId> OntologyModel::find_properties(ConceptRef c, std::string_view name) const {
  std::vector<PropertyId> out;
  for (const auto id : prop(c)) {
    if (name_of(id) == name) out.push_back(id);
  }
  return out;
}

std::vector<std::string> OntologyModel::instance_values(ConceptRef c) const {
  std::vector<std::string> out;
  for (const auto& inst : data_->instances) {
    if (inst.concept_ref == c) out.push_back(inst.value);
  }
  return out;
}

void OntologyBuilder::check_concept(ConceptRef c, Errc code) const {
  if (c.index >= data_.concepts.size()) {
    throw Error(code, "concept ref " + std::to_string(c.index) + " does not resolve");
  }
}

ConceptRef OntologyBuilder::add_concept(std::string_view name, std::optional<ConceptRef> parent) {
  if (name.empty()) throw Error(Errc::UnknownConcept, "concept name must not be empty");
  if (data_.byName.contains(std::string(name))) {
    throw Error(Errc::DuplicateConcept, "concept '" + std::string(name) + "' already declared");
  }
  if (parent) check_concept(*parent, Errc::UnknownParent);
  const ConceptRef ref{static_cast<std::uint32_t>(data_.concepts.size())};
  data_.concepts.push_back({std::string(name), parent});
  data_.byName.emplace(std::string(name), ref.index);
  data_.children.emplace_back();
  data_.props.emplace_back();
  if (parent) data_.children[parent->index].push_back(ref);
  return ref;
}

ConceptRef OntologyBuilder::add_concept(std::string_view name, std::string_view parentName) {
  const auto p = find(parentName);
  if (!p) throw Error(Errc::UnknownParent, "parent '" + std::string(parentName) + "' is not declared");
  return add_concept(name, *p);
}

PropertyId OntologyBuilder::add_property(std::string_view name, ConceptRef domain, Range range, Cardinality card,
                                         std::optional<std::string> value) {
  check_concept(domain, Errc::UnknownConcept);
  if (const auto* r = std::get_if<ConceptRef>(&range)) check_concept(*r, Errc::UnknownConcept);
  if (card.max && card.min > *card.max) {
    throw Error(Errc::InvalidCardinality, "property '" + std::string(name) + "' has min " +
                                              std::to_string(card.min) + " > max " + std::to_string(*card.max));
  }
  const PropertyId id{data_.nextId++};
  data_.byId.emplace(id.value, static_cast<std::uint32_t>(data_.properties.size()));
  data_.properties.push_back({id, std::string(name), domain, range, card, std::move(value)});
  data_.props[domain.index].push_back(id);
  return id;
}

void OntologyBuilder::add_instance(ConceptRef c, std::string value) {
  check_concept(c, Errc::UnknownConcept);
  data_.instances.push_back({c, std::move(value)});
}

std::optional<ConceptRef> OntologyBuilder::find(std::string_view name) const {
  const auto it = data_.byName.find(std::string(name));
  if (it == data_.byName.end()) return std::nullopt;
  return ConceptRef{it->second};
}

OntologyModel OntologyBuilder::build() const {
  return OntologyModel(std::make_shared<const detail::ModelData>(data_));
}

OntologyModel add_concept(const OntologyModel& model, std::string_view name, std::optional<ConceptRef> parent) {
  OntologyBuilder b(model);
  b.add_concept(name, parent);
  return b.build();
}

OntologyModel add_property(const OntologyModel& model, std::string_view name, ConceptRef domain, Range range,
                           Cardinality card, std::optional<std::string> value) {
  OntologyBuilder b(model);
  b.add_property(name, domain, range, card, std::move(value));
  return b.build();
}

OntologyModel add_instance(const OntologyModel& model, ConceptRef c, std::string value) {
  OntologyBuilder b(model);
  b.add_instance(c, std::move(value));
  return b.build();
}

OntologyModel merge(const OntologyModel& a, const OntologyModel& b) {
  OntologyBuilder out(a);
  const auto parentName = [](const OntologyModel& m, const ConceptDecl& d) -> std::optional<std::string> {
    if (!d.parent) return std::nullopt;
    return m.concept_name(*d.parent);
  };

  // b's concept vector lists parents before children, so a single pass
  // suffices.
  for (const auto& decl : b.concepts()) {
    const auto theirParent = parentName(b, decl);
    if (const auto existing = a.find(decl.name)) {
      if (parentName(a, a.concept_decl(*existing)) != theirParent) {
        throw Error(Errc::ConflictingConcept, "concept '" + decl.name + "' declared under different parents");
      }
      continue;
    }
    std::optional<ConceptRef> parent;
    if (theirParent) parent = out.find(*theirParent);
    out.add_concept(decl.name, parent);
  }

  const auto translate = [&](const Range& r) -> Range {
    if (const auto* c = std::get_if<ConceptRef>(&r)) return *out.find(b.concept_name(*c));
    return r;
  };

  for (const auto& p : b.properties()) {
    const auto domainName = b.concept_name(p.domain);
    const auto rangeName = range_key(b, p.range);
    bool duplicate = false;
    if (const auto ad = a.find(domainName)) {
      for (const auto id : a.find_properties(*ad, p.name)) {
        const auto& q = a.property(id);
        if (range_key(a, q.range) != rangeName) continue;
        if (q.card != p.card || q.value != p.value) {
          throw Error(Errc::ConflictingProperty,
                      "property '" + p.name + "' on '" + domainName + "' declared with different restrictions");
        }
        duplicate = true;
      }
    }
    if (!duplicate) out.add_property(p.name, *out.find(domainName), translate(p.range), p.card, p.value);
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& inst : a.instances()) seen.emplace(a.concept_name(inst.concept_ref), inst.value);
  for (const auto& inst : b.instances()) {
    auto key = std::make_pair(b.concept_name(inst.concept_ref), inst.value);
    if (seen.insert(key).second) out.add_instance(*out.find(key.first), inst.value);
  }
  return out.build();
}

bool structurally_equal(const OntologyModel& a, const OntologyModel& b) {
  using ConceptKey = std::pair<std::string, std::string>;
  const auto concepts = [](const OntologyModel& m) {
    std::multiset<ConceptKey> s;
    for (const auto& d : m.concepts()) s.emplace(d.name, d.parent ? m.concept_name(*d.parent) : std::string("\x01"));
    return s;
  };
  using PropKey = std::tuple<std::string, std::string, std::string, std::uint32_t, std::int64_t, std::string>;
  const auto properties = [](const OntologyModel& m) {
    std::multiset<PropKey> s;
    for (const auto& p : m.properties()) {
      s.emplace(m.concept_name(p.domain), p.name, range_key(m, p.range), p.card.min,
                p.card.max ? static_cast<std::int64_t>(*p.card.max) : -1, p.value.value_or("\x01"));
    }
    return s;
  };
  const auto instances = [](const OntologyModel& m) {
    std::multiset<ConceptKey> s;
    for (const auto& i : m.instances()) s.emplace(m.concept_name(i.concept_ref), i.value);
    return s;
  };
  return concepts(a) == concepts(b) && properties(a) == properties(b) && instances(a) == instances(b);
}

}  // namespace protoforge::onto
