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

#include "protoforge/diagnostic.hpp"

#include <algorithm>

namespace protoforge {

std::string_view to_string(RuleCategory c) noexcept {
  switch (c) {
    case RuleCategory::Processing: return "Processing";
    case RuleCategory::Cryptographic: return "Cryptographic";
    case RuleCategory::Storage: return "Storage";
    case RuleCategory::Structure: return "Structure";
  }
  return "?";
}

std::string_view to_string(RuleOrigin o) noexcept {
  return o == RuleOrigin::Core ? "Core" : "Extrapolated";
}

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "ERROR" : "WARNING"; }

std::string format_line(const Diagnostic& d) {
  std::string line;
  line += to_string(d.severity);
  line += '\t';
  line += d.rule.id;
  line += '\t';
  line += d.subject;
  line += '\t';
  // Keep one diagnostic per line.
  for (const char c : d.message) line += (c == '\n' || c == '\t') ? ' ' : c;
  return line;
}

bool has_errors(std::span<const Diagnostic> diagnostics) noexcept {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace protoforge
