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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protoforge/diagnostic.hpp"
#include "protoforge/error.hpp"
#include "protoforge/semspec.hpp"
#include "protoforge/seqspec.hpp"

/// Compiles a role's sequential specification plus its semantic
/// specification into an executable plan.
namespace protoforge::plan {

using seqspec::Direction;

enum class ActionKind : std::uint8_t {
  GenerateRandom,
  LoadFromModule,
  RecallValue,
  TypeCheck,
  EncryptUnder,
  DecryptUnder,
  SignUnder,
  VerifySignature,
  StoreBinding,
  VerifyEquality,
  ExtractComponent,
};

std::string_view to_string(ActionKind k) noexcept;

/// Where a concept's value can come from at run time, tried in order:
/// session binding, instance literal, keystore item.
struct ValueSource {
  std::string concept_name;
  std::optional<std::string> literal;
  std::optional<std::string> keystoreItem;

  bool operator==(const ValueSource&) const = default;
};

struct TermPlan;

struct TermAction {
  ActionKind kind = ActionKind::TypeCheck;
  std::string subject;  // concept the action is planned for

  std::uint32_t lengthBits = 0;  // GenerateRandom
  std::string module;            // LoadFromModule locator
  std::string item;              // LoadFromModule keystore item
  std::string typeTag;           // TypeCheck
  std::string algorithm;         // Encrypt/Decrypt/Sign/VerifySignature
  ValueSource key;               // Encrypt/Decrypt/Sign/VerifySignature
  ValueSource target;            // RecallValue, StoreBinding, VerifyEquality, ExtractComponent (container)
  std::uint32_t position = 0;    // ExtractComponent
  std::vector<TermPlan> payload;  // Encrypt/Decrypt/Sign/VerifySignature components

  bool operator==(const TermAction&) const;
};

struct TermPlan {
  std::string concept_name;
  std::vector<TermAction> actions;

  bool operator==(const TermPlan&) const = default;
};

struct ElementStep {
  seqspec::ElementDecl element;
  TermPlan plan;

  bool operator==(const ElementStep&) const = default;
};

struct MessageStep {
  Direction direction = Direction::Output;
  std::string operation;
  std::string message;
  std::vector<ElementStep> elements;

  bool operator==(const MessageStep&) const = default;
};

struct Condition {
  std::string name;
  ValueSource source;

  bool operator==(const Condition&) const = default;
};

struct RolePlan {
  std::string role;
  std::vector<MessageStep> steps;
  std::vector<Condition> preconditions;
  std::vector<Condition> effects;

  bool operator==(const RolePlan&) const = default;
};

/// Raised when a specification pair fails validation; carries every
/// diagnostic that caused the rejection.
class SpecRejected : public Error {
 public:
  explicit SpecRejected(std::vector<Diagnostic> diagnostics);
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Maximum nesting of cryptographic terms.
inline constexpr int kMaxDepth = 8;

/// Throws Error with MissingKeyProperty, MissingAlgorithm, InvalidLength,
/// UnresolvableReference or CyclicDependency.
TermPlan plan_element(onto::ConceptRef c, Direction direction, const semspec::SemSpec& spec);

/// Throws SpecRejected when cross_check or the core rules report errors,
/// Error(DependencyUnsatisfiable) when a value is read before any earlier
/// action or the keystore can provide it, and plan_element's errors.
RolePlan plan_role(const seqspec::RoleSpec& role, const semspec::SemSpec& spec);

/// Source of a concept's value outside the session bindings.
ValueSource value_source(onto::ConceptRef c, const semspec::SemSpec& spec);

/// Stable indented text rendering.
std::string dump(const RolePlan& plan);
std::string dump(const TermPlan& plan, int indent = 0);

/// Every action of the plan in execution order: payload components come
/// before their cryptographic action on Output and after it on Input.
std::vector<const TermAction*> flatten(const RolePlan& plan);

}  // namespace protoforge::plan
