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

#include "protoforge/envelope.hpp"

#include <algorithm>

#include "protoforge/error.hpp"
#include "protoforge/xml.hpp"

namespace protoforge::envelope {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedEnvelope, what); }

constexpr std::uint32_t kMaxFrame = 64u << 20;

}  // namespace

const Bytes* Envelope::find(std::string_view element) const {
  for (const auto& [name, value] : elements) {
    if (name == element) return &value;
  }
  return nullptr;
}

std::string encode(const Envelope& env) {
  std::string out;
  out += R"(<env:Envelope xmlns:env="urn:protoforge:env:1"><env:Message name=")";
  out += xml::escape(env.message, true);
  out += "\">";
  for (const auto& [name, value] : env.elements) {
    out += R"(<env:Element name=")";
    out += xml::escape(name, true);
    out += R"(" enc="base64">)";
    out += base64_encode(value);
    out += "</env:Element>";
  }
  out += "</env:Message></env:Envelope>";
  return out;
}

Envelope decode(std::string_view wire) {
  xml::Element root;
  try {
    root = xml::parse(wire);
  } catch (const Error& e) {
    malformed(e.what());
  }
  if (!root.is(kEnvelopeNamespace, "Envelope") || root.children.size() != 1) malformed("expected one env:Message");
  const auto& msg = root.children.front();
  const auto* name = msg.attr("name");
  if (!msg.is(kEnvelopeNamespace, "Message") || name == nullptr) malformed("expected env:Message with a name");
  Envelope env;
  env.message = *name;
  for (const auto& el : msg.children) {
    const auto* elName = el.attr("name");
    const auto* enc = el.attr("enc");
    if (!el.is(kEnvelopeNamespace, "Element") || elName == nullptr || enc == nullptr || *enc != "base64") {
      malformed("expected env:Element with name and enc=\"base64\"");
    }
    auto value = base64_decode(el.text);
    if (!value) malformed("element '" + *elName + "' is not valid base64");
    env.elements.emplace_back(*elName, std::move(*value));
  }
  if (encode(env) != wire) malformed("envelope is not in canonical form");
  return env;
}

Bytes frame(ByteView payload) {
  if (payload.size() > kMaxFrame) throw Error(Errc::MalformedEnvelope, "frame too large");
  const auto n = static_cast<std::uint32_t>(payload.size());
  Bytes out(4 + payload.size());
  out[0] = static_cast<std::uint8_t>(n >> 24);
  out[1] = static_cast<std::uint8_t>(n >> 16);
  out[2] = static_cast<std::uint8_t>(n >> 8);
  out[3] = static_cast<std::uint8_t>(n);
  std::copy(payload.begin(), payload.end(), out.begin() + 4);
  return out;
}

std::optional<Bytes> unframe(Bytes& buffer) {
  if (buffer.size() < 4) return std::nullopt;
  const std::uint32_t n = (std::uint32_t{buffer[0]} << 24) | (std::uint32_t{buffer[1]} << 16) |
                          (std::uint32_t{buffer[2]} << 8) | std::uint32_t{buffer[3]};
  if (n > kMaxFrame) throw Error(Errc::MalformedEnvelope, "frame too large");
  if (buffer.size() < 4 + std::size_t{n}) return std::nullopt;
  Bytes payload(buffer.begin() + 4, buffer.begin() + 4 + n);
  buffer.erase(buffer.begin(), buffer.begin() + 4 + n);
  return payload;
}

}  // namespace protoforge::envelope
