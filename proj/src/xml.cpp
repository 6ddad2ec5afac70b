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

#include "protoforge/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace protoforge::xml {

namespace {

constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";
constexpr std::string_view kXmlnsNamespace = "http://www.w3.org/2000/xmlns/";

using Scope = std::vector<std::pair<std::string, std::string>>;

std::pair<std::string, std::string> split_qname(std::string_view qname) {
  const auto colon = qname.find(':');
  if (colon == std::string_view::npos) return {std::string(), std::string(qname)};
  return {std::string(qname.substr(0, colon)), std::string(qname.substr(colon + 1))};
}

const std::string* lookup(const Scope& scope, std::string_view prefix) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    if (it->first == prefix) return &it->second;
  }
  return nullptr;
}

bool name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool name_char(unsigned char c) {
  return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element run() {
    if (doc_.substr(0, 3) == "\xEF\xBB\xBF") advance(3);
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    Scope scope{{"xml", std::string(kXmlNamespace)}};
    Element root = element(scope);
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, col_, what); }

  bool at_end() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i) {
      if (doc_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    advance(s.size());
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) advance();
  }

  void skip_until(std::string_view terminator, const char* what) {
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    advance(end - pos_ + terminator.size());
  }

  // Whitespace, comments and processing instructions around the root.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        fail("document type declarations are not supported");
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (at_end() || !name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    const auto start = pos_;
    while (!at_end() && name_char(static_cast<unsigned char>(peek()))) advance();
    return std::string(doc_.substr(start, pos_ - start));
  }

  void entity(std::string& out) {
    expect("&");
    const auto end = doc_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 10) fail("malformed entity reference");
    const auto ref = doc_.substr(pos_, end - pos_);
    if (ref == "lt") {
      out.push_back('<');
    } else if (ref == "gt") {
      out.push_back('>');
    } else if (ref == "amp") {
      out.push_back('&');
    } else if (ref == "quot") {
      out.push_back('"');
    } else if (ref == "apos") {
      out.push_back('\'');
    } else if (ref.size() > 1 && ref[0] == '#') {
      const bool hex = ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      std::uint32_t cp = 0;
      for (const char c : digits) {
        std::uint32_t d = 0;
        if (c >= '0' && c <= '9') {
          d = static_cast<std::uint32_t>(c - '0');
        } else if (hex && c >= 'a' && c <= 'f') {
          d = static_cast<std::uint32_t>(c - 'a' + 10);
        } else if (hex && c >= 'A' && c <= 'F') {
          d = static_cast<std::uint32_t>(c - 'A' + 10);
        } else {
          fail("bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + d;
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) fail("character reference out of range");
      append_utf8(out, cp);
    } else {
      fail("unknown entity '" + std::string(ref) + "'");
    }
    advance(end - pos_ + 1);
  }

  std::string attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = peek();
    advance();
    std::string out;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') {
        entity(out);
      } else {
        out.push_back(peek());
        advance();
      }
    }
    if (at_end()) fail("unterminated attribute value");
    advance();
    return out;
  }

  Element element(const Scope& parentScope) {
    Element el;
    el.line = line_;
    el.column = col_;
    expect("<");
    const auto tag = name();
    auto [prefix, local] = split_qname(tag);
    el.prefix = std::move(prefix);
    el.local = std::move(local);

    std::vector<std::pair<std::string, std::string>> raw;
    for (;;) {
      const bool hadSpace = !at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r');
      skip_ws();
      if (at_end()) fail("unterminated start tag");
      if (peek() == '/' || peek() == '>') break;
      if (!hadSpace) fail("attributes must be separated by whitespace");
      auto attrName = name();
      skip_ws();
      expect("=");
      skip_ws();
      auto value = attribute_value();
      for (const auto& [n, v] : raw) {
        if (n == attrName) fail("duplicate attribute '" + attrName + "'");
      }
      raw.emplace_back(std::move(attrName), std::move(value));
    }

    Scope scope = parentScope;
    for (const auto& [n, v] : raw) {
      if (n == "xmlns") {
        scope.emplace_back("", v);
      } else if (n.rfind("xmlns:", 0) == 0) {
        if (v.empty()) fail("empty namespace binding for '" + n + "'");
        scope.emplace_back(n.substr(6), v);
      }
    }
    if (const auto* uri = lookup(scope, el.prefix)) {
      el.ns = *uri;
    } else if (!el.prefix.empty()) {
      fail("unbound prefix '" + el.prefix + "'");
    }
    for (auto& [n, v] : raw) {
      Attribute a;
      auto [p, l] = split_qname(n);
      a.prefix = std::move(p);
      a.local = std::move(l);
      if (a.prefix == "xmlns" || (a.prefix.empty() && a.local == "xmlns")) {
        a.ns = std::string(kXmlnsNamespace);
      } else if (!a.prefix.empty()) {
        const auto* uri = lookup(scope, a.prefix);
        if (uri == nullptr) fail("unbound prefix '" + a.prefix + "'");
        a.ns = *uri;
      }
      a.value = std::move(v);
      el.attributes.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < el.attributes.size(); ++i) {
      for (std::size_t j = i + 1; j < el.attributes.size(); ++j) {
        const auto& a = el.attributes[i];
        const auto& b = el.attributes[j];
        if (!a.ns.empty() && a.ns == b.ns && a.local == b.local && a.ns != kXmlnsNamespace) {
          fail("duplicate expanded attribute '" + b.qname() + "'");
        }
      }
    }
    el.scope = scope;

    if (starts_with("/>")) {
      advance(2);
      return el;
    }
    expect(">");
    for (;;) {
      if (at_end()) fail("unterminated element '" + tag + "'");
      if (starts_with("</")) {
        advance(2);
        const auto closing = name();
        if (closing != tag) fail("mismatched end tag '" + closing + "', expected '" + tag + "'");
        skip_ws();
        expect(">");
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        const auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        el.text.append(doc_.substr(pos_, end - pos_));
        advance(end - pos_ + 3);
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!")) {
        fail("markup declarations are not supported");
      } else if (peek() == '<') {
        el.children.push_back(element(scope));
      } else if (peek() == '&') {
        entity(el.text);
      } else {
        el.text.push_back(peek());
        advance();
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool only_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

void write_element(std::string& out, const Element& el, const WriteOptions& options, int depth) {
  if (options.pretty) out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += el.qname();
  for (const auto& a : el.attributes) {
    out += ' ';
    out += a.qname();
    out += "=\"";
    out += escape(a.value, true);
    out += '"';
  }
  const bool hasText = !el.text.empty() && !(options.pretty && only_whitespace(el.text));
  if (el.children.empty() && !hasText) {
    out += "/>";
    if (options.pretty) out += '\n';
    return;
  }
  out += '>';
  if (hasText) out += escape(el.text, false);
  if (!el.children.empty()) {
    if (options.pretty) out += '\n';
    for (const auto& child : el.children) write_element(out, child, options, depth + 1);
    if (options.pretty) out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += el.qname();
  out += '>';
  if (options.pretty) out += '\n';
}

}  // namespace

const std::string* Element::attr(std::string_view localName) const {
  for (const auto& a : attributes) {
    if (a.prefix.empty() && a.local == localName) return &a.value;
  }
  return nullptr;
}

const std::string* Element::attr(std::string_view nsUri, std::string_view localName) const {
  for (const auto& a : attributes) {
    if (a.ns == nsUri && a.local == localName) return &a.value;
  }
  return nullptr;
}

std::pair<std::string, std::string> Element::resolve_qname(std::string_view qname) const {
  auto [prefix, local] = split_qname(qname);
  const auto* uri = lookup(scope, prefix);
  if (uri == nullptr) {
    if (prefix.empty()) return {std::string(), std::move(local)};
    throw SyntaxError(line, column, "unbound prefix '" + prefix + "' in '" + std::string(qname) + "'");
  }
  return {*uri, std::move(local)};
}

Element& Element::add_child(std::string qname) {
  auto& child = children.emplace_back();
  auto [p, l] = split_qname(qname);
  child.prefix = std::move(p);
  child.local = std::move(l);
  return child;
}

Element& Element::set_attr(std::string qname, std::string value) {
  auto [p, l] = split_qname(qname);
  for (auto& a : attributes) {
    if (a.prefix == p && a.local == l) {
      a.value = std::move(value);
      return *this;
    }
  }
  Attribute a;
  a.prefix = std::move(p);
  a.local = std::move(l);
  a.value = std::move(value);
  attributes.push_back(std::move(a));
  return *this;
}

Element parse(std::string_view document) { return Parser(document).run(); }

std::string escape(std::string_view raw, bool inAttribute) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        if (inAttribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\n':
        if (inAttribute) {
          out += "&#10;";
        } else {
          out += c;
        }
        break;
      case '\t':
        if (inAttribute) {
          out += "&#9;";
        } else {
          out += c;
        }
        break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string write(const Element& root, const WriteOptions& options) {
  std::string out;
  if (options.declaration) {
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";
    if (options.pretty) out += '\n';
  }
  write_element(out, root, options, 0);
  return out;
}

}  // namespace protoforge::xml
