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

#include "protoforge/semspec.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <tuple>

#include "protoforge/xml.hpp"

namespace protoforge::semspec {

namespace {

using onto::Cardinality;
using onto::ConceptRef;
using onto::LiteralKind;
using Shape = RangeExpectation::Shape;

constexpr RangeExpectation literal(LiteralKind k) { return {Shape::Literal, k, {}, false}; }
constexpr RangeExpectation anchored(SubOntologyKind a, LiteralKind alt) { return {Shape::Anchor, alt, a, true}; }
constexpr RangeExpectation anyConcept() { return {Shape::AnyConcept, {}, {}, false}; }
constexpr RangeExpectation marker() { return {Shape::Marker, {}, {}, false}; }

const std::array<VocabularyEntry, 17> kVocabulary{{
    {vocab::kIsOfType, literal(LiteralKind::TypeTag), ExecutionMeaning::TypeTag},
    {vocab::kIsEncrypted, marker(), ExecutionMeaning::EncryptUnder},
    {vocab::kSymmEncrypted, marker(), ExecutionMeaning::EncryptUnder},
    {vocab::kIsSigned, marker(), ExecutionMeaning::SignUnder},
    {vocab::kIsStored, anyConcept(), ExecutionMeaning::StoreBinding},
    {vocab::kIsVerified, anyConcept(), ExecutionMeaning::VerifyEquality},
    {vocab::kIsExtracted, anyConcept(), ExecutionMeaning::ExtractComponent},
    {vocab::kHasSymmetricAlgorithm, anchored(SubOntologyKind::CryptographicAlgorithm, LiteralKind::AlgRef),
     ExecutionMeaning::SymmetricAlgorithmOf},
    {vocab::kHasAsymmetricAlgorithm, anchored(SubOntologyKind::CryptographicAlgorithm, LiteralKind::AlgRef),
     ExecutionMeaning::AsymmetricAlgorithmOf},
    {vocab::kHasSignatureAlgorithm, anchored(SubOntologyKind::CryptographicAlgorithm, LiteralKind::AlgRef),
     ExecutionMeaning::SignatureAlgorithmOf},
    {vocab::kHasKey, anyConcept(), ExecutionMeaning::KeyOf},
    {vocab::kIsLoaded, anchored(SubOntologyKind::LoadingModule, LiteralKind::ModuleRef),
     ExecutionMeaning::LoadFromModule},
    {vocab::kHasLength, literal(LiteralKind::Natural), ExecutionMeaning::LengthBits},
    {vocab::kRandomNumber, marker(), ExecutionMeaning::FreshRandom},
    {vocab::kRefersTo, anyConcept(), ExecutionMeaning::RecallValue},
    {vocab::kHasLocator, literal(LiteralKind::ModuleRef), ExecutionMeaning::ModuleLocator},
    {vocab::kHasIdentifier, literal(LiteralKind::KeyRef), ExecutionMeaning::ItemIdentifier},
}};

constexpr std::array<std::string_view, 5> kAlgorithms{
    "sym:aes-128-cbc", "sym:aes-256-cbc", "asym:rsa-2048-oaep", "sig:rsa-2048-pss", "hash:sha-256",
};

[[noreturn]] void fail_at(const xml::Element& el, Errc code, const std::string& what) {
  throw Error(code, "line " + std::to_string(el.line) + ": " + what);
}

const std::string& required(const xml::Element& el, std::string_view name) {
  const auto* v = el.attr(name);
  if (v == nullptr) {
    throw xml::SyntaxError(el.line, el.column,
                           "<" + el.qname() + "> is missing attribute '" + std::string(name) + "'");
  }
  return *v;
}

std::uint32_t parse_natural(const xml::Element& el, const std::string& text) {
  std::uint32_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw xml::SyntaxError(el.line, el.column, "'" + text + "' is not a natural number");
  }
  return value;
}

std::string range_text(const onto::OntologyModel& m, const onto::Range& r) {
  if (const auto* c = std::get_if<ConceptRef>(&r)) return m.concept_name(*c);
  return std::string(onto::to_token(std::get<LiteralKind>(r)));
}

}  // namespace

std::string_view anchor_name(SubOntologyKind kind) noexcept {
  switch (kind) {
    case SubOntologyKind::SecurityProtocolCore: return "SecurityProtocolCore";
    case SubOntologyKind::CommunicationTerm: return "CommunicationTerm";
    case SubOntologyKind::KnownTerm: return "KnownTerm";
    case SubOntologyKind::GeneratedTerm: return "GeneratedTerm";
    case SubOntologyKind::LoadedTerm: return "LoadedTerm";
    case SubOntologyKind::LoadingModule: return "LoadingModule";
    case SubOntologyKind::CryptographicAlgorithm: return "CryptographicAlgorithm";
  }
  return "?";
}

std::span<const VocabularyEntry> vocabulary() noexcept { return kVocabulary; }

const VocabularyEntry* find_vocabulary(std::string_view propertyName) noexcept {
  for (const auto& e : kVocabulary) {
    if (e.propertyName == propertyName) return &e;
  }
  return nullptr;
}

std::span<const std::string_view> algorithm_registry() noexcept { return kAlgorithms; }

bool is_registered_algorithm(std::string_view token) noexcept {
  return std::find(kAlgorithms.begin(), kAlgorithms.end(), token) != kAlgorithms.end();
}

bool is_valid_namespace(std::string_view uri) noexcept {
  static const std::regex kUri(R"(^[A-Za-z][A-Za-z0-9+.\-]*:[^\s#]+$)");
  return std::regex_match(uri.begin(), uri.end(), kUri);
}

SemSpec::SemSpec(onto::OntologyModel model, std::string namespaceUri)
    : model_(std::move(model)), namespace_(std::move(namespaceUri)) {
  if (!is_valid_namespace(namespace_)) {
    throw Error(Errc::InvalidNamespace, "'" + namespace_ + "' is not an absolute URI without fragment");
  }
  const auto root = model_.find(kRootConcept);
  if (!root || model_.parent(*root)) {
    throw Error(Errc::MissingAnchor, "root concept '" + std::string(kRootConcept) + "' is missing");
  }
  root_ = *root;
  for (const auto kind : kAllKinds) {
    const auto a = model_.find(anchor_name(kind));
    if (!a || model_.parent(*a) != root_) {
      throw Error(Errc::MissingAnchor,
                  "anchor '" + std::string(anchor_name(kind)) + "' must be a child of " + std::string(kRootConcept));
    }
    anchors_[static_cast<std::size_t>(kind)] = *a;
  }
  for (std::uint32_t i = 0; i < model_.concepts().size(); ++i) {
    const ConceptRef c{i};
    if (c != root_ && !kind_of(c)) {
      throw Error(Errc::MissingAnchor, "concept '" + model_.concept_name(c) + "' is outside every sub-ontology");
    }
  }
}

std::optional<SubOntologyKind> SemSpec::kind_of(ConceptRef c) const {
  auto cur = c;
  while (auto p = model_.parent(cur)) {
    if (*p == root_) {
      for (const auto kind : kAllKinds) {
        if (anchor(kind) == cur) return kind;
      }
      return std::nullopt;
    }
    cur = *p;
  }
  return std::nullopt;
}

onto::OntologyBuilder scaffold_builder() {
  onto::OntologyBuilder b;
  const auto root = b.add_concept(kRootConcept);
  for (const auto kind : kAllKinds) b.add_concept(anchor_name(kind), root);
  return b;
}

SemSpec scaffold(std::string_view namespaceUri) {
  return SemSpec(scaffold_builder().build(), std::string(namespaceUri));
}

SemSpec parse_semspec(std::string_view document) {
  const auto root = xml::parse(document);
  if (!root.is(kDocumentNamespace, "SemSpec")) {
    throw xml::SyntaxError(root.line, root.column,
                           "root element must be SemSpec in namespace " + std::string(kDocumentNamespace));
  }
  const auto& ns = required(root, "namespace");

  struct PendingConcept {
    const xml::Element* el;
    std::string name;
    std::optional<std::string> parent;
  };
  std::vector<PendingConcept> concepts;
  std::map<std::string, std::size_t> declared;
  std::vector<const xml::Element*> properties;
  std::vector<const xml::Element*> instances;

  for (const auto& child : root.children) {
    if (child.ns != kDocumentNamespace) {
      throw xml::SyntaxError(child.line, child.column, "unexpected element <" + child.qname() + ">");
    }
    if (child.local == "Concept") {
      PendingConcept pc{&child, required(child, "name"), std::nullopt};
      if (const auto* p = child.attr("parent")) pc.parent = *p;
      if (!declared.emplace(pc.name, concepts.size()).second) {
        fail_at(child, Errc::DuplicateConcept, "concept '" + pc.name + "' declared twice");
      }
      concepts.push_back(std::move(pc));
    } else if (child.local == "Property") {
      properties.push_back(&child);
    } else if (child.local == "Instance") {
      instances.push_back(&child);
    } else {
      throw xml::SyntaxError(child.line, child.column, "unexpected element <" + child.qname() + ">");
    }
  }

  // Parents may be declared after their children; add in dependency order.
  onto::OntologyBuilder builder;
  for (const auto& pc : concepts) {
    if (pc.parent && !declared.contains(*pc.parent)) {
      fail_at(*pc.el, Errc::UnknownParentRef, "concept '" + pc.name + "' names undeclared parent '" + *pc.parent + "'");
    }
  }
  std::vector<bool> added(concepts.size(), false);
  std::size_t remaining = concepts.size();
  while (remaining > 0) {
    std::size_t progress = 0;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
      if (added[i]) continue;
      const auto& pc = concepts[i];
      if (pc.parent && !builder.find(*pc.parent)) continue;
      if (pc.parent) {
        builder.add_concept(pc.name, *pc.parent);
      } else {
        builder.add_concept(pc.name);
      }
      added[i] = true;
      ++progress;
    }
    if (progress == 0) {
      for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (!added[i]) fail_at(*concepts[i].el, Errc::CyclicHierarchy, "concept '" + concepts[i].name + "' is on a parent cycle");
      }
    }
    remaining -= progress;
  }

  for (const auto* el : properties) {
    const auto& name = required(*el, "name");
    const auto& domainName = required(*el, "domain");
    const auto& rangeText = required(*el, "range");
    const auto domain = builder.find(domainName);
    if (!domain) fail_at(*el, Errc::UnknownConcept, "property '" + name + "' has unknown domain '" + domainName + "'");
    onto::Range range;
    if (rangeText.rfind("lit:", 0) == 0) {
      const auto kind = onto::literal_from_token(rangeText);
      if (!kind) throw xml::SyntaxError(el->line, el->column, "unknown literal kind '" + rangeText + "'");
      range = *kind;
    } else {
      const auto r = builder.find(rangeText);
      if (!r) fail_at(*el, Errc::UnknownConcept, "property '" + name + "' has unknown range '" + rangeText + "'");
      range = *r;
    }
    Cardinality card;
    card.min = parse_natural(*el, required(*el, "min"));
    const auto& maxText = required(*el, "max");
    if (maxText != "unbounded") card.max = parse_natural(*el, maxText);
    std::optional<std::string> value;
    if (const auto* v = el->attr("value")) value = *v;
    try {
      builder.add_property(name, *domain, range, card, std::move(value));
    } catch (const Error& e) {
      fail_at(*el, e.code(), e.what());
    }
  }

  for (const auto* el : instances) {
    const auto& conceptName = required(*el, "concept");
    const auto c = builder.find(conceptName);
    if (!c) fail_at(*el, Errc::UnknownConcept, "instance of unknown concept '" + conceptName + "'");
    builder.add_instance(*c, required(*el, "value"));
  }

  return SemSpec(builder.build(), ns);
}

std::string serialize_semspec(const SemSpec& spec) {
  const auto& m = spec.model();
  xml::Element root;
  root.local = "SemSpec";
  root.set_attr("xmlns", std::string(kDocumentNamespace));
  root.set_attr("namespace", spec.namespace_uri());

  const auto byName = [&](ConceptRef a, ConceptRef b) { return m.concept_name(a) < m.concept_name(b); };
  std::vector<ConceptRef> stack{spec.root()};
  while (!stack.empty()) {
    const auto c = stack.back();
    stack.pop_back();
    auto& el = root.add_child("Concept");
    el.set_attr("name", m.concept_name(c));
    if (const auto p = m.parent(c)) el.set_attr("parent", m.concept_name(*p));
    std::vector<ConceptRef> kids(m.subcon(c).begin(), m.subcon(c).end());
    std::sort(kids.begin(), kids.end(), byName);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }

  std::vector<const onto::PropertyDecl*> props;
  for (const auto& p : m.properties()) props.push_back(&p);
  const auto propKey = [&](const onto::PropertyDecl* p) {
    return std::make_tuple(m.concept_name(p->domain), p->name, range_text(m, p->range), p->card.min,
                           p->card.max.value_or(UINT32_MAX), p->value.value_or(""));
  };
  std::stable_sort(props.begin(), props.end(), [&](auto* a, auto* b) { return propKey(a) < propKey(b); });
  for (const auto* p : props) {
    auto& el = root.add_child("Property");
    el.set_attr("name", p->name);
    el.set_attr("domain", m.concept_name(p->domain));
    el.set_attr("range", range_text(m, p->range));
    el.set_attr("min", std::to_string(p->card.min));
    el.set_attr("max", p->card.max ? std::to_string(*p->card.max) : std::string("unbounded"));
    if (p->value) el.set_attr("value", *p->value);
  }

  std::vector<std::pair<std::string, std::string>> insts;
  for (const auto& i : m.instances()) insts.emplace_back(m.concept_name(i.concept_ref), i.value);
  std::sort(insts.begin(), insts.end());
  for (const auto& [c, v] : insts) {
    auto& el = root.add_child("Instance");
    el.set_attr("concept", c);
    el.set_attr("value", v);
  }
  return xml::write(root);
}

ConceptRef resolve_reference(const SemSpec& spec, std::string_view uriRef) {
  const auto hash = uriRef.rfind('#');
  if (hash == std::string_view::npos) {
    throw Error(Errc::UnknownFragment, "reference '" + std::string(uriRef) + "' has no fragment");
  }
  const auto ns = uriRef.substr(0, hash);
  const auto fragment = uriRef.substr(hash + 1);
  if (ns != spec.namespace_uri()) {
    throw Error(Errc::NamespaceMismatch,
                "reference '" + std::string(uriRef) + "' is outside namespace " + spec.namespace_uri());
  }
  const auto c = spec.model().find(fragment);
  if (!c || fragment.empty()) {
    throw Error(Errc::UnknownFragment, "no concept '" + std::string(fragment) + "' in " + spec.namespace_uri());
  }
  return *c;
}

bool structurally_equal(const SemSpec& a, const SemSpec& b) {
  return a.namespace_uri() == b.namespace_uri() && onto::structurally_equal(a.model(), b.model());
}

std::optional<std::string> literal_of(const onto::OntologyModel& m, ConceptRef c, std::string_view name) {
  for (const auto id : m.prop(c)) {
    const auto& p = m.property(id);
    if (p.name == name && p.value) return p.value;
  }
  return std::nullopt;
}

std::optional<ConceptRef> concept_range_of(const onto::OntologyModel& m, ConceptRef c, std::string_view name) {
  for (const auto id : m.prop(c)) {
    const auto& p = m.property(id);
    if (p.name != name) continue;
    if (const auto* r = std::get_if<ConceptRef>(&p.range)) return *r;
  }
  return std::nullopt;
}

bool has_property(const onto::OntologyModel& m, ConceptRef c, std::string_view name) {
  for (const auto id : m.prop(c)) {
    if (m.name_of(id) == name) return true;
  }
  return false;
}

bool has_exact_one(const onto::OntologyModel& m, ConceptRef c, std::string_view name) {
  for (const auto id : m.prop(c)) {
    const auto& p = m.property(id);
    if (p.name == name && p.card.exactly_one()) return true;
  }
  return false;
}

bool is_cryptographic(const onto::OntologyModel& m, ConceptRef c) {
  return has_property(m, c, vocab::kSymmEncrypted) || has_property(m, c, vocab::kIsEncrypted) ||
         has_property(m, c, vocab::kIsSigned);
}

}  // namespace protoforge::semspec
