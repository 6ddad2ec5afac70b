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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "protoforge/error.hpp"

/// Minimal namespace-aware XML reader/writer covering the constrained
/// dialects used by the specification documents and the wire envelope.
/// DTDs are rejected outright.
namespace protoforge::xml {

struct Attribute {
  std::string prefix;
  std::string local;
  std::string ns;  // empty for unprefixed attributes
  std::string value;

  [[nodiscard]] std::string qname() const { return prefix.empty() ? local : prefix + ":" + local; }
};

struct Element {
  std::string prefix;
  std::string local;
  std::string ns;
  std::vector<Attribute> attributes;  // xmlns declarations included, in document order
  std::vector<Element> children;
  std::string text;  // direct character data, concatenated
  std::size_t line = 0;
  std::size_t column = 0;

  [[nodiscard]] std::string qname() const { return prefix.empty() ? local : prefix + ":" + local; }
  [[nodiscard]] bool is(std::string_view nsUri, std::string_view localName) const {
    return ns == nsUri && local == localName;
  }
  /// Unqualified attribute lookup.
  [[nodiscard]] const std::string* attr(std::string_view localName) const;
  [[nodiscard]] const std::string* attr(std::string_view nsUri, std::string_view localName) const;
  /// Resolves a QName-valued attribute content ("tns:Foo") against the
  /// declarations in scope at this element. Returns {namespace, local}.
  [[nodiscard]] std::pair<std::string, std::string> resolve_qname(std::string_view qname) const;

  Element& add_child(std::string qname);
  Element& set_attr(std::string qname, std::string value);

  // Prefix bindings visible at this element (filled by the parser, or by
  // set_attr("xmlns:..") on constructed trees).
  std::vector<std::pair<std::string, std::string>> scope;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : Error(Errc::SyntaxError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

Element parse(std::string_view document);

struct WriteOptions {
  bool declaration = true;
  bool pretty = true;
};

std::string write(const Element& root, const WriteOptions& options = {});

std::string escape(std::string_view raw, bool inAttribute);

}  // namespace protoforge::xml
