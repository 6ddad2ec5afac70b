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

#include <functional>
#include <string_view>
#include <vector>

#include "protoforge/diagnostic.hpp"
#include "protoforge/semspec.hpp"

namespace protoforge::rules {

using RulePredicate = std::function<std::vector<Diagnostic>(const semspec::SemSpec&)>;

const RuleDescriptor& rule1();
const RuleDescriptor& rule2();
const RuleDescriptor& rule3();

/// Every KnownTerm descendant whose parent carries no SymmEncrypted
/// property must declare isOfType with cardinality exactly one.
std::vector<Diagnostic> check_rule1(const semspec::SemSpec& spec);
/// Every GeneratedTerm descendant declaring RandomNumber must declare
/// hasLength with cardinality exactly one.
std::vector<Diagnostic> check_rule2(const semspec::SemSpec& spec);
/// Every LoadedTerm descendant must declare isLoaded with cardinality
/// exactly one.
std::vector<Diagnostic> check_rule3(const semspec::SemSpec& spec);

struct RegisteredRule {
  RuleDescriptor descriptor;
  RulePredicate predicate;
  std::string explanation;
};

class RuleRegistry {
 public:
  /// R1-R3 only.
  static RuleRegistry core();
  /// R1-R3 plus the shipped extrapolated rules.
  static RuleRegistry standard();

  /// Throws Error(ReservedRuleId) for R1-R3 or a Core-origin descriptor,
  /// Error(DuplicateRuleId) for an id already registered.
  RuleRegistry& register_rule(RuleDescriptor descriptor, RulePredicate predicate, std::string explanation = {});

  /// Diagnostics sorted by (rule id, subject). Extrapolated rules run only
  /// when asked for.
  [[nodiscard]] std::vector<Diagnostic> check_all(const semspec::SemSpec& spec, bool includeExtrapolated) const;

  [[nodiscard]] const RegisteredRule* find(std::string_view id) const;
  [[nodiscard]] const std::vector<RegisteredRule>& rules() const noexcept { return rules_; }

 private:
  RuleRegistry() = default;
  std::vector<RegisteredRule> rules_;
};

/// check_all against RuleRegistry::standard().
std::vector<Diagnostic> check_all(const semspec::SemSpec& spec, bool includeExtrapolated);

}  // namespace protoforge::rules
