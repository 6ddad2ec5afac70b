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
#include <span>
#include <string>
#include <string_view>

namespace protoforge {

enum class RuleCategory : std::uint8_t { Processing, Cryptographic, Storage, Structure };
/// Core rules are the three published well-formedness rules; everything
/// else registered in the engine is Extrapolated.
enum class RuleOrigin : std::uint8_t { Core, Extrapolated };
enum class Severity : std::uint8_t { Error, Warning };

std::string_view to_string(RuleCategory c) noexcept;
std::string_view to_string(RuleOrigin o) noexcept;
std::string_view to_string(Severity s) noexcept;

struct RuleDescriptor {
  std::string id;
  RuleCategory category = RuleCategory::Structure;
  RuleOrigin origin = RuleOrigin::Extrapolated;
  std::string summary;
};

struct Diagnostic {
  RuleDescriptor rule;
  std::string subject;  // concept, element or message name
  std::string message;
  Severity severity = Severity::Error;

  bool operator==(const Diagnostic& o) const {
    return rule.id == o.rule.id && subject == o.subject && message == o.message && severity == o.severity;
  }
};

/// SEVERITY<TAB>RULE_ID<TAB>CONCEPT<TAB>MESSAGE
std::string format_line(const Diagnostic& d);

bool has_errors(std::span<const Diagnostic> diagnostics) noexcept;

}  // namespace protoforge
