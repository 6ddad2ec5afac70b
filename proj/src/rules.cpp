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

#include "protoforge/rules.hpp"

#include <algorithm>

#include "protoforge/error.hpp"

namespace protoforge::rules {

namespace {

using onto::ConceptRef;
using semspec::SubOntologyKind;
namespace vocab = semspec::vocab;

Diagnostic make(const RuleDescriptor& rule, std::string subject, std::string message) {
  const auto severity = rule.origin == RuleOrigin::Core ? Severity::Error : Severity::Warning;
  return Diagnostic{rule, std::move(subject), std::move(message), severity};
}

RuleDescriptor extrapolated(std::string id, RuleCategory category, std::string summary) {
  return {std::move(id), category, RuleOrigin::Extrapolated, std::move(summary)};
}

bool has_any(const onto::OntologyModel& m, ConceptRef c, std::initializer_list<std::string_view> names) {
  return std::any_of(names.begin(), names.end(), [&](auto n) { return semspec::has_property(m, c, n); });
}

std::vector<Diagnostic> check_encrypted_terms(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (std::uint32_t i = 0; i < m.concepts().size(); ++i) {
    const ConceptRef c{i};
    if (!semspec::is_cryptographic(m, c)) continue;
    if (!semspec::has_property(m, c, vocab::kHasKey)) {
      out.push_back(make(rule, m.concept_name(c), "cryptographic term has no hasKey property"));
    }
    if (!has_any(m, c, {vocab::kHasSymmetricAlgorithm, vocab::kHasAsymmetricAlgorithm, vocab::kHasSignatureAlgorithm})) {
      out.push_back(make(rule, m.concept_name(c), "cryptographic term has no algorithm property"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_key_ranges(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto& p : m.properties()) {
    if (p.name != vocab::kHasKey) continue;
    const auto* r = std::get_if<ConceptRef>(&p.range);
    const bool ok = r != nullptr && (m.is_descendant(*r, spec.anchor(SubOntologyKind::LoadedTerm)) ||
                                     m.is_descendant(*r, spec.anchor(SubOntologyKind::GeneratedTerm)));
    if (!ok) {
      out.push_back(make(rule, m.concept_name(p.domain), "hasKey range must be a LoadedTerm or GeneratedTerm concept"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_communication_terms(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto c : m.descendants(spec.anchor(SubOntologyKind::CommunicationTerm))) {
    if (semspec::is_cryptographic(m, c)) continue;
    if (!has_any(m, c, {vocab::kIsStored, vocab::kIsVerified, vocab::kIsExtracted, vocab::kRefersTo,
                        vocab::kRandomNumber, vocab::kIsLoaded})) {
      out.push_back(make(rule, m.concept_name(c),
                         "communication term has no processing property (isStored, isVerified, isExtracted, "
                         "refersTo, RandomNumber or isLoaded)"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_module_locators(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto c : m.descendants(spec.anchor(SubOntologyKind::LoadingModule))) {
    if (!semspec::has_exact_one(m, c, vocab::kHasLocator)) {
      out.push_back(make(rule, m.concept_name(c), "loading module has no hasLocator property of cardinality 1"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_algorithm_tokens(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  const auto algorithms = spec.anchor(SubOntologyKind::CryptographicAlgorithm);
  for (const auto& inst : m.instances()) {
    if (!m.is_descendant(inst.concept_ref, algorithms)) continue;
    if (!semspec::is_registered_algorithm(inst.value)) {
      out.push_back(make(rule, m.concept_name(inst.concept_ref), "unregistered algorithm token '" + inst.value + "'"));
    }
  }
  for (const auto& p : m.properties()) {
    const auto* lit = std::get_if<onto::LiteralKind>(&p.range);
    if (lit != nullptr && *lit == onto::LiteralKind::AlgRef && p.value && !semspec::is_registered_algorithm(*p.value)) {
      out.push_back(make(rule, m.concept_name(p.domain), "unregistered algorithm token '" + *p.value + "'"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_vocabulary_ranges(const semspec::SemSpec& spec, const RuleDescriptor& rule) {
  using Shape = semspec::RangeExpectation::Shape;
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto& p : m.properties()) {
    const auto* entry = semspec::find_vocabulary(p.name);
    if (entry == nullptr) continue;
    const auto& want = entry->expectedRange;
    const auto* lit = std::get_if<onto::LiteralKind>(&p.range);
    const auto* con = std::get_if<ConceptRef>(&p.range);
    bool ok = true;
    switch (want.shape) {
      case Shape::Marker: break;
      case Shape::Literal: ok = lit != nullptr && *lit == want.literal && p.value.has_value(); break;
      case Shape::AnyConcept: ok = con != nullptr; break;
      case Shape::Anchor:
        ok = (con != nullptr && m.is_descendant(*con, spec.anchor(want.anchor))) ||
             (lit != nullptr && want.literalAlternative && *lit == want.literal && p.value.has_value());
        break;
    }
    if (!ok) {
      out.push_back(make(rule, m.concept_name(p.domain), "property '" + p.name + "' has an unexpected range"));
    }
  }
  return out;
}

}  // namespace

const RuleDescriptor& rule1() {
  static const RuleDescriptor d{"R1", RuleCategory::Processing, RuleOrigin::Core,
                                "KnownTerm sub-concepts outside cryptographic terms declare isOfType [1,1]"};
  return d;
}

const RuleDescriptor& rule2() {
  static const RuleDescriptor d{"R2", RuleCategory::Cryptographic, RuleOrigin::Core,
                                "GeneratedTerm sub-concepts with RandomNumber declare hasLength [1,1]"};
  return d;
}

const RuleDescriptor& rule3() {
  static const RuleDescriptor d{"R3", RuleCategory::Storage, RuleOrigin::Core,
                                "LoadedTerm sub-concepts declare isLoaded [1,1]"};
  return d;
}

std::vector<Diagnostic> check_rule1(const semspec::SemSpec& spec) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto c : m.descendants(spec.anchor(SubOntologyKind::KnownTerm))) {
    const auto parent = m.parent(c);
    if (parent && semspec::has_property(m, *parent, vocab::kSymmEncrypted)) continue;
    if (!semspec::has_exact_one(m, c, vocab::kIsOfType)) {
      out.push_back(make(rule1(), m.concept_name(c), "known term has no isOfType property with mincard = maxcard = 1"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_rule2(const semspec::SemSpec& spec) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto c : m.descendants(spec.anchor(SubOntologyKind::GeneratedTerm))) {
    if (!semspec::has_property(m, c, vocab::kRandomNumber)) continue;
    if (!semspec::has_exact_one(m, c, vocab::kHasLength)) {
      out.push_back(
          make(rule2(), m.concept_name(c), "random term has no hasLength property with mincard = maxcard = 1"));
    }
  }
  return out;
}

std::vector<Diagnostic> check_rule3(const semspec::SemSpec& spec) {
  std::vector<Diagnostic> out;
  const auto& m = spec.model();
  for (const auto c : m.descendants(spec.anchor(SubOntologyKind::LoadedTerm))) {
    if (!semspec::has_exact_one(m, c, vocab::kIsLoaded)) {
      out.push_back(make(rule3(), m.concept_name(c), "loaded term has no isLoaded property with mincard = maxcard = 1"));
    }
  }
  return out;
}

RuleRegistry RuleRegistry::core() {
  RuleRegistry r;
  r.rules_.push_back({rule1(), check_rule1,
                      "Processing rule. For every sub-concept c of KnownTerm whose parent has no SymmEncrypted "
                      "property, c must carry an isOfType property with mincard = maxcard = 1."});
  r.rules_.push_back({rule2(), check_rule2,
                      "Cryptographic rule. For every sub-concept c of GeneratedTerm with a RandomNumber property, "
                      "c must carry a hasLength property with mincard = maxcard = 1."});
  r.rules_.push_back({rule3(), check_rule3,
                      "Storage rule. For every sub-concept c of LoadedTerm, c must carry an isLoaded property with "
                      "mincard = maxcard = 1."});
  return r;
}

RuleRegistry RuleRegistry::standard() {
  auto r = core();
  const auto add = [&r](RuleDescriptor d, auto fn, std::string explanation) {
    r.register_rule(
        d, [d, fn](const semspec::SemSpec& s) { return fn(s, d); }, std::move(explanation));
  };
  add(extrapolated("X-ALG-REG", RuleCategory::Cryptographic, "algorithm tokens come from the registry"),
      check_algorithm_tokens,
      "Every instance under CryptographicAlgorithm and every lit:algref filler must be a registered algorithm "
      "token (sym:aes-128-cbc, sym:aes-256-cbc, asym:rsa-2048-oaep, sig:rsa-2048-pss, hash:sha-256).");
  add(extrapolated("X-COMM-PROC", RuleCategory::Processing, "communication terms carry a processing property"),
      check_communication_terms,
      "Every non-cryptographic CommunicationTerm descendant must say how it is produced or consumed: isStored, "
      "isVerified, isExtracted, refersTo, RandomNumber or isLoaded.");
  add(extrapolated("X-ENC-KEY", RuleCategory::Cryptographic, "cryptographic terms carry a key and an algorithm"),
      check_encrypted_terms,
      "Every concept marked SymmEncrypted, isEncrypted or isSigned must carry hasKey and one of "
      "hasSymmetricAlgorithm, hasAsymmetricAlgorithm, hasSignatureAlgorithm.");
  add(extrapolated("X-KEY-RANGE", RuleCategory::Cryptographic, "keys are loaded or generated terms"),
      check_key_ranges, "The range of every hasKey property must be a LoadedTerm or GeneratedTerm descendant.");
  add(extrapolated("X-MODULE-LOC", RuleCategory::Storage, "loading modules carry a locator"),
      check_module_locators, "Every LoadingModule descendant must carry hasLocator with mincard = maxcard = 1.");
  add(extrapolated("X-VOCAB-RANGE", RuleCategory::Processing, "vocabulary properties have the expected range"),
      check_vocabulary_ranges,
      "Properties from the canonical vocabulary must use the range shape the vocabulary registry expects; literal "
      "ranges must carry a value.");
  return r;
}

RuleRegistry& RuleRegistry::register_rule(RuleDescriptor descriptor, RulePredicate predicate, std::string explanation) {
  if (descriptor.id == "R1" || descriptor.id == "R2" || descriptor.id == "R3" ||
      descriptor.origin == RuleOrigin::Core) {
    throw Error(Errc::ReservedRuleId, "rule id '" + descriptor.id + "' is reserved for the core rules");
  }
  if (find(descriptor.id) != nullptr) {
    throw Error(Errc::DuplicateRuleId, "rule id '" + descriptor.id + "' is already registered");
  }
  if (explanation.empty()) explanation = descriptor.summary;
  rules_.push_back({std::move(descriptor), std::move(predicate), std::move(explanation)});
  return *this;
}

std::vector<Diagnostic> RuleRegistry::check_all(const semspec::SemSpec& spec, bool includeExtrapolated) const {
  std::vector<Diagnostic> out;
  for (const auto& rule : rules_) {
    if (!includeExtrapolated && rule.descriptor.origin != RuleOrigin::Core) continue;
    auto found = rule.predicate(spec);
    out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.rule.id, a.subject) < std::tie(b.rule.id, b.subject);
  });
  return out;
}

const RegisteredRule* RuleRegistry::find(std::string_view id) const {
  for (const auto& r : rules_) {
    if (r.descriptor.id == id) return &r;
  }
  return nullptr;
}

std::vector<Diagnostic> check_all(const semspec::SemSpec& spec, bool includeExtrapolated) {
  static const RuleRegistry registry = RuleRegistry::standard();
  return registry.check_all(spec, includeExtrapolated);
}

}  // namespace protoforge::rules
