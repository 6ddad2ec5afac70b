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
#include <string>
#include <string_view>
#include <vector>

#include "protoforge/diagnostic.hpp"
#include "protoforge/semspec.hpp"

/// The per-role sequential specification: a WSDL-S style document with one
/// portType, one binding, message schemas whose elements are annotated with
/// semantic model references, and precondition/effect annotations.
namespace protoforge::seqspec {

inline constexpr std::string_view kWsdlNamespace = "urn:protoforge:wsdl:1";
inline constexpr std::string_view kXsdNamespace = "urn:protoforge:xsd:1";
inline constexpr std::string_view kWssemNamespace = "urn:protoforge:wssem:1";

enum class XsdType : std::uint8_t { Text, Base64Binary };
enum class Direction : std::uint8_t { Input, Output };

std::string_view to_string(Direction d) noexcept;

struct ElementDecl {
  std::string name;
  XsdType type = XsdType::Base64Binary;
  std::string modelReference;

  bool operator==(const ElementDecl&) const = default;
};

struct MessageDecl {
  std::string name;
  std::vector<ElementDecl> elements;

  bool operator==(const MessageDecl&) const = default;
};

struct OperationDecl {
  std::string name;
  Direction direction = Direction::Output;
  std::string message;

  bool operator==(const OperationDecl&) const = default;
};

struct Annotation {
  std::string name;
  std::string modelReference;

  bool operator==(const Annotation&) const = default;
};

struct RoleSpec {
  std::string roleName;
  std::string targetNamespace;
  std::string portTypeName;
  std::string bindingName;
  std::vector<OperationDecl> operations;  // document order is execution order
  std::vector<MessageDecl> messages;
  std::vector<Annotation> preconditions;
  std::vector<Annotation> effects;

  [[nodiscard]] const MessageDecl* find_message(std::string_view name) const;

  bool operator==(const RoleSpec&) const = default;
};

/// Throws xml::SyntaxError, or Error with UnresolvedMessageRef,
/// DuplicateElement, MultiplePortTypes or MultipleBindings.
RoleSpec parse_seqspec(std::string_view document);
std::string serialize_seqspec(const RoleSpec& role);

/// Structural problems that do not prevent parsing: no operations, orphan
/// or doubly-referenced messages, empty messages, element references
/// without a fragment.
std::vector<Diagnostic> validate_seqspec(const RoleSpec& role);

/// One diagnostic for every model reference (elements, preconditions,
/// effects) that does not resolve in the semantic specification.
std::vector<Diagnostic> cross_check(const RoleSpec& role, const semspec::SemSpec& spec);

}  // namespace protoforge::seqspec
