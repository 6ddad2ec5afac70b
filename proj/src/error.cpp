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

#include "protoforge/error.hpp"

namespace protoforge {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateConcept: return "DuplicateConcept";
    case Errc::UnknownParent: return "UnknownParent";
    case Errc::UnknownConcept: return "UnknownConcept";
    case Errc::UnknownProperty: return "UnknownProperty";
    case Errc::InvalidCardinality: return "InvalidCardinality";
    case Errc::ConflictingConcept: return "ConflictingConcept";
    case Errc::ConflictingProperty: return "ConflictingProperty";
    case Errc::CyclicHierarchy: return "CyclicHierarchy";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownParentRef: return "UnknownParentRef";
    case Errc::InvalidNamespace: return "InvalidNamespace";
    case Errc::NamespaceMismatch: return "NamespaceMismatch";
    case Errc::UnknownFragment: return "UnknownFragment";
    case Errc::MissingAnchor: return "MissingAnchor";
    case Errc::UnresolvedMessageRef: return "UnresolvedMessageRef";
    case Errc::DuplicateElement: return "DuplicateElement";
    case Errc::MultiplePortTypes: return "MultiplePortTypes";
    case Errc::MultipleBindings: return "MultipleBindings";
    case Errc::DuplicateRuleId: return "DuplicateRuleId";
    case Errc::ReservedRuleId: return "ReservedRuleId";
    case Errc::MissingKeyProperty: return "MissingKeyProperty";
    case Errc::MissingAlgorithm: return "MissingAlgorithm";
    case Errc::InvalidLength: return "InvalidLength";
    case Errc::UnresolvableReference: return "UnresolvableReference";
    case Errc::CyclicDependency: return "CyclicDependency";
    case Errc::DependencyUnsatisfiable: return "DependencyUnsatisfiable";
    case Errc::SpecRejected: return "SpecRejected";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::Timeout: return "Timeout";
    case Errc::TransportClosed: return "TransportClosed";
    case Errc::ConnectionRefused: return "ConnectionRefused";
    case Errc::InvalidEndpoint: return "InvalidEndpoint";
    case Errc::MessageNameMismatch: return "MessageNameMismatch";
    case Errc::MalformedEnvelope: return "MalformedEnvelope";
    case Errc::DecryptionFailure: return "DecryptionFailure";
    case Errc::VerificationMismatch: return "VerificationMismatch";
    case Errc::TypeCheckFailure: return "TypeCheckFailure";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::CryptoFailure: return "CryptoFailure";
    case Errc::KeystoreError: return "KeystoreError";
    case Errc::EffectNotAchieved: return "EffectNotAchieved";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace protoforge
