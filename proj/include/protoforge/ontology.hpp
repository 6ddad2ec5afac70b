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

#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "protoforge/error.hpp"

/// The ontology model: concepts arranged in a single-parent forest,
/// cardinality-restricted properties between a domain concept and a range,
/// and instances carrying literal values.
///
/// OntologyModel values are immutable and cheap to copy (shared storage);
/// every construction function returns a new model and leaves its input
/// untouched. OntologyBuilder is the in-place counterpart used for bulk
/// construction.
namespace protoforge::onto {

struct ConceptRef {
  std::uint32_t index = 0;
  auto operator<=>(const ConceptRef&) const = default;
};

/// The unique property identifier, assigned by the model from a
/// monotonic counter.
struct PropertyId {
  std::uint64_t value = 0;
  auto operator<=>(const PropertyId&) const = default;
};

enum class LiteralKind : std::uint8_t { Natural, Text, Bytes, AlgRef, KeyRef, ModuleRef, TypeTag };

std::string_view to_token(LiteralKind kind) noexcept;
std::optional<LiteralKind> literal_from_token(std::string_view token) noexcept;

using Range = std::variant<ConceptRef, LiteralKind>;

struct Cardinality {
  std::uint32_t min = 0;
  std::optional<std::uint32_t> max;  // nullopt: unbounded

  [[nodiscard]] bool bounded() const noexcept { return max.has_value(); }
  [[nodiscard]] bool exactly_one() const noexcept { return min == 1 && max == 1u; }

  static Cardinality exactly(std::uint32_t n) { return {n, n}; }
  static Cardinality between(std::uint32_t lo, std::uint32_t hi) { return {lo, hi}; }
  static Cardinality at_least(std::uint32_t lo) { return {lo, std::nullopt}; }

  bool operator==(const Cardinality&) const = default;
};

struct ConceptDecl {
  std::string name;
  std::optional<ConceptRef> parent;
};

struct PropertyDecl {
  PropertyId id;
  std::string name;
  ConceptRef domain;
  Range range;
  Cardinality card;
  // Filler for literal ranges ("hasLength = 128"); absent for concept ranges.
  std::optional<std::string> value;
};

struct InstanceDecl {
  ConceptRef concept_ref;
  std::string value;
};

namespace detail {
struct ModelData {
  std::vector<ConceptDecl> concepts;
  std::vector<PropertyDecl> properties;
  std::vector<InstanceDecl> instances;
  std::unordered_map<std::string, std::uint32_t> byName;
  std::unordered_map<std::uint64_t, std::uint32_t> byId;
  std::vector<std::vector<ConceptRef>> children;
  std::vector<std::vector<PropertyId>> props;
  std::uint64_t nextId = 1;
};
}  // namespace detail

class OntologyModel {
 public:
  OntologyModel();

  [[nodiscard]] std::span<const ConceptDecl> concepts() const noexcept { return data_->concepts; }
  [[nodiscard]] std::span<const PropertyDecl> properties() const noexcept { return data_->properties; }
  [[nodiscard]] std::span<const InstanceDecl> instances() const noexcept { return data_->instances; }

  [[nodiscard]] std::optional<ConceptRef> find(std::string_view name) const;
  /// Like find() but throws Error(UnknownConcept).
  [[nodiscard]] ConceptRef require(std::string_view name) const;
  [[nodiscard]] const ConceptDecl& concept_decl(ConceptRef c) const;
  [[nodiscard]] const std::string& concept_name(ConceptRef c) const { return concept_decl(c).name; }
  [[nodiscard]] const PropertyDecl& property(PropertyId p) const;

  // Mapping functions over the model.
  [[nodiscard]] ConceptRef domain(PropertyId p) const { return property(p).domain; }
  [[nodiscard]] const Range& range(PropertyId p) const { return property(p).range; }
  [[nodiscard]] const std::string& name_of(PropertyId p) const { return property(p).name; }
  [[nodiscard]] std::uint32_t mincard(PropertyId p) const { return property(p).card.min; }
  [[nodiscard]] std::optional<std::uint32_t> maxcard(PropertyId p) const { return property(p).card.max; }
  [[nodiscard]] std::span<const PropertyId> prop(ConceptRef c) const;
  [[nodiscard]] std::optional<ConceptRef> parent(ConceptRef c) const { return concept_decl(c).parent; }
  [[nodiscard]] std::span<const ConceptRef> subcon(ConceptRef c) const;
  /// Transitive closure of subcon, preorder; never contains c itself.
  [[nodiscard]] std::vector<ConceptRef> descendants(ConceptRef c) const;
  [[nodiscard]] bool is_descendant(ConceptRef c, ConceptRef ancestor) const;

  /// Properties of c named `name`, in declaration order.
  [[nodiscard]] std::vector<PropertyId> find_properties(ConceptRef c, std::string_view name) const;
  [[nodiscard]] std::vector<std::string> instance_values(ConceptRef c) const;

 private:
  friend class OntologyBuilder;
  explicit OntologyModel(std::shared_ptr<const detail::ModelData> data) : data_(std::move(data)) {}

  std::shared_ptr<const detail::ModelData> data_;
};

class OntologyBuilder {
 public:
  OntologyBuilder() = default;
  explicit OntologyBuilder(const OntologyModel& base) : data_(*base.data_) {}

  ConceptRef add_concept(std::string_view name, std::optional<ConceptRef> parent = std::nullopt);
  ConceptRef add_concept(std::string_view name, std::string_view parentName);
  PropertyId add_property(std::string_view name, ConceptRef domain, Range range, Cardinality card,
                          std::optional<std::string> value = std::nullopt);
  void add_instance(ConceptRef c, std::string value);

  [[nodiscard]] std::optional<ConceptRef> find(std::string_view name) const;

  [[nodiscard]] OntologyModel build() const;

 private:
  void check_concept(ConceptRef c, Errc code) const;

  detail::ModelData data_;
};

// Functional construction API.
OntologyModel add_concept(const OntologyModel& model, std::string_view name,
                          std::optional<ConceptRef> parent = std::nullopt);
OntologyModel add_property(const OntologyModel& model, std::string_view name, ConceptRef domain, Range range,
                           Cardinality card, std::optional<std::string> value = std::nullopt);
OntologyModel add_instance(const OntologyModel& model, ConceptRef c, std::string value);

/// Union of two models. Concepts are matched by name and must agree on the
/// parent's name; properties are matched by (name, domain, range) and must
/// agree on cardinality and filler.
OntologyModel merge(const OntologyModel& a, const OntologyModel& b);

/// Equality on names and structure, ignoring property ids and declaration
/// order.
bool structurally_equal(const OntologyModel& a, const OntologyModel& b);

}  // namespace protoforge::onto
