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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protoforge {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

Bytes to_bytes(std::string_view text);
std::string to_string(ByteView bytes);

std::string base64_encode(ByteView bytes);
/// Strict decoder: rejects whitespace, bad padding and foreign characters.
std::optional<Bytes> base64_decode(std::string_view text);

std::string hex_encode(ByteView bytes);

/// Length-prefixed (4-byte big-endian) concatenation used for composite
/// term payloads.
Bytes encode_components(std::span<const Bytes> components);
std::optional<std::vector<Bytes>> decode_components(ByteView packed);

/// Reads a whole file; throws Error(IoError) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace protoforge
