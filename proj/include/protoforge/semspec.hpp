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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "protoforge/ontology.hpp"

namespace protoforge::semspec {

/// The seven anchored regions every semantic specification is built from.
enum class SubOntologyKind : std::uint8_t {
  SecurityProtocolCore,
  CommunicationTerm,
  KnownTerm,
  GeneratedTerm,
  LoadedTerm,
  LoadingModule,
  CryptographicAlgorithm,
};

inline constexpr std::array<SubOntologyKind, 7> kAllKinds{
    SubOntologyKind::SecurityProtocolCore, SubOntologyKind::CommunicationTerm, SubOntologyKind::KnownTerm,
    SubOntologyKind::GeneratedTerm,        SubOntologyKind::LoadedTerm,        SubOntologyKind::LoadingModule,
    SubOntologyKind::CryptographicAlgorithm,
};

inline constexpr std::string_view kRootConcept = "SecurityProtocol";
inline constexpr std::string_view kDocumentNamespace = "urn:protoforge:semspec:1";

std::string_view anchor_name(SubOntologyKind kind) noexcept;

// Canonical property vocabulary.
namespace vocab {
inline constexpr std::string_view kIsOfType = "isOfType";
inline constexpr std::string_view kIsEncrypted = "isEncrypted";
inline constexpr std::string_view kSymmEncrypted = "SymmEncrypted";
inline constexpr std::string_view kIsSigned = "isSigned";
inline constexpr std::string_view kIsStored = "isStored";
inline constexpr std::string_view kIsVerified = "isVerified";
inline constexpr std::string_view kIsExtracted = "isExtracted";
inline constexpr std::string_view kHasSymmetricAlgorithm = "hasSymmetricAlgorithm";
inline constexpr std::string_view kHasAsymmetricAlgorithm = "hasAsymmetricAlgorithm";
inline constexpr std::string_view kHasSignatureAlgorithm = "hasSignatureAlgorithm";
inline constexpr std::string_view kHasKey = "hasKey";
inline constexpr std::string_view kIsLoaded = "isLoaded";
inline constexpr std::string_view kHasLength = "hasLength";
inline constexpr std::string_view kRandomNumber = "RandomNumber";
inline constexpr std::string_view kRefersTo = "refersTo";
inline constexpr std::string_view kHasLocator = "hasLocator";
inline constexpr std::string_view kHasIdentifier = "hasIdentifier";
}  // namespace vocab

enum class ExecutionMeaning : std::uint8_t {
  TypeTag,
  EncryptUnder,
  SignUnder,
  StoreBinding,
  VerifyEquality,
  ExtractComponent,
  SymmetricAlgorithmOf,
  AsymmetricAlgorithmOf,
  SignatureAlgorithmOf,
  KeyOf,
  LoadFromModule,
  LengthBits,
  FreshRandom,
  RecallValue,
  ModuleLocator,
  ItemIdentifier,
};

/// What a vocabulary property expects as its range.
struct RangeExpectation {
  enum class Shape : std::uint8_t { Literal, Anchor, AnyConcept, Marker } shape = Shape::Marker;
  onto::LiteralKind literal = onto::LiteralKind::Bytes;  // Shape::Literal
  SubOntologyKind anchor = SubOntologyKind::SecurityProtocolCore;  // Shape::Anchor
  bool literalAlternative = false;  // Anchor shape also accepts `literal`
};

struct VocabularyEntry {
  std::string_view propertyName;
  RangeExpectation expectedRange;
  ExecutionMeaning executionMeaning;
};

std::span<const VocabularyEntry> vocabulary() noexcept;
const VocabularyEntry* find_vocabulary(std::string_view propertyName) noexcept;

/// Registered algorithm tokens ("sym:aes-128-cbc", ...).
std::span<const std::string_view> algorithm_registry() noexcept;
bool is_registered_algorithm(std::string_view token) noexcept;

class SemSpec {
 public:
  /// Validates anchor presence and containment; throws Error(MissingAnchor)
  /// or Error(InvalidNamespace).
  SemSpec(onto::OntologyModel model, std::string namespaceUri);

  [[nodiscard]] const onto::OntologyModel& model() const noexcept { return model_; }
  [[nodiscard]] const std::string& namespace_uri() const noexcept { return namespace_; }
  [[nodiscard]] onto::ConceptRef root() const noexcept { return root_; }
  [[nodiscard]] onto::ConceptRef anchor(SubOntologyKind kind) const noexcept {
    return anchors_[static_cast<std::size_t>(kind)];
  }
  /// The sub-ontology a concept lives in; nullopt for the root.
  [[nodiscard]] std::optional<SubOntologyKind> kind_of(onto::ConceptRef c) const;

 private:
  onto::OntologyModel model_;
  std::string namespace_;
  onto::ConceptRef root_;
  std::array<onto::ConceptRef, 7> anchors_{};
};

bool is_valid_namespace(std::string_view uri) noexcept;

/// Builder pre-populated with the root and the seven anchors.
onto::OntologyBuilder scaffold_builder();
SemSpec scaffold(std::string_view namespaceUri);

SemSpec parse_semspec(std::string_view document);
std::string serialize_semspec(const SemSpec& spec);

/// Resolves "<namespace>#<Concept>" against the spec.
onto::ConceptRef resolve_reference(const SemSpec& spec, std::string_view uriRef);

bool structurally_equal(const SemSpec& a, const SemSpec& b);

// Accessors shared by the rule engine and planner.

/// Literal filler of the first property named `name` on c.
std::optional<std::string> literal_of(const onto::OntologyModel& m, onto::ConceptRef c, std::string_view name);
/// Concept range of the first property named `name` on c.
std::optional<onto::ConceptRef> concept_range_of(const onto::OntologyModel& m, onto::ConceptRef c,
                                                 std::string_view name);
bool has_property(const onto::OntologyModel& m, onto::ConceptRef c, std::string_view name);
bool has_exact_one(const onto::OntologyModel& m, onto::ConceptRef c, std::string_view name);
/// True when c carries one of the encryption markers (SymmEncrypted,
/// isEncrypted, isSigned).
bool is_cryptographic(const onto::OntologyModel& m, onto::ConceptRef c);

}  // namespace protoforge::semspec
