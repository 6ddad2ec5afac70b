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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "protoforge/bytes.hpp"

/// Wire representation of one protocol message:
///
///   <env:Envelope xmlns:env="urn:protoforge:env:1"><env:Message name="M">
///   <env:Element name="E" enc="base64">...</env:Element>...</env:Message></env:Envelope>
///
/// written without whitespace or XML declaration. Decoding only accepts the
/// exact bytes the encoder would produce.
namespace protoforge::envelope {

inline constexpr std::string_view kEnvelopeNamespace = "urn:protoforge:env:1";

struct Envelope {
  std::string message;
  std::vector<std::pair<std::string, Bytes>> elements;  // declaration order

  [[nodiscard]] const Bytes* find(std::string_view element) const;

  bool operator==(const Envelope&) const = default;
};

std::string encode(const Envelope& env);
/// Throws Error(MalformedEnvelope).
Envelope decode(std::string_view wire);

/// 4-byte big-endian length prefix for stream transports.
Bytes frame(ByteView payload);
/// Splits one frame off the front of `buffer`; nullopt while incomplete.
std::optional<Bytes> unframe(Bytes& buffer);

}  // namespace protoforge::envelope
