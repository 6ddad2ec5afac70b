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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace protoforge {

/// Error codes shared by every layer of the engine. Spec-loading codes come
/// first, runtime (session) codes last.
enum class Errc : std::uint8_t {
  // ontology
  DuplicateConcept,
  UnknownParent,
  UnknownConcept,
  UnknownProperty,
  InvalidCardinality,
  ConflictingConcept,
  ConflictingProperty,
  CyclicHierarchy,
  // documents
  SyntaxError,
  UnknownParentRef,
  InvalidNamespace,
  NamespaceMismatch,
  UnknownFragment,
  MissingAnchor,
  UnresolvedMessageRef,
  DuplicateElement,
  MultiplePortTypes,
  MultipleBindings,
  // rules
  DuplicateRuleId,
  ReservedRuleId,
  // planning
  MissingKeyProperty,
  MissingAlgorithm,
  InvalidLength,
  UnresolvableReference,
  CyclicDependency,
  DependencyUnsatisfiable,
  SpecRejected,
  // runtime
  PreconditionFailed,
  Timeout,
  TransportClosed,
  ConnectionRefused,
  InvalidEndpoint,
  MessageNameMismatch,
  MalformedEnvelope,
  DecryptionFailure,
  VerificationMismatch,
  TypeCheckFailure,
  MissingBinding,
  CryptoFailure,
  KeystoreError,
  EffectNotAchieved,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace protoforge
