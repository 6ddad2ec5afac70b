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

#include "protoforge/bytes.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "protoforge/error.hpp"

namespace protoforge {

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

std::string to_string(ByteView bytes) { return std::string(bytes.begin(), bytes.end()); }

std::string base64_encode(ByteView bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int written =
      EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::optional<Bytes> base64_decode(std::string_view text) {
  if (text.empty()) return Bytes{};
  if (text.size() % 4 != 0) return std::nullopt;
  std::size_t padding = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool alnum = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (alnum || c == '+' || c == '/') {
      if (padding != 0) return std::nullopt;
      continue;
    }
    if (c == '=' && i + 2 >= text.size()) {
      ++padding;
      continue;
    }
    return std::nullopt;
  }
  Bytes out(3 * text.size() / 4);
  const int written = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (written < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(written) - padding);
  // Reject non-canonical trailing bits so every byte string has one encoding.
  if (base64_encode(out) != text) return std::nullopt;
  return out;
}

std::string hex_encode(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes encode_components(std::span<const Bytes> components) {
  Bytes out;
  for (const auto& c : components) {
    const auto n = static_cast<std::uint32_t>(c.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::optional<std::vector<Bytes>> decode_components(ByteView packed) {
  std::vector<Bytes> out;
  std::size_t pos = 0;
  while (pos < packed.size()) {
    if (packed.size() - pos < 4) return std::nullopt;
    const std::uint32_t n = (std::uint32_t{packed[pos]} << 24) | (std::uint32_t{packed[pos + 1]} << 16) |
                            (std::uint32_t{packed[pos + 2]} << 8) | std::uint32_t{packed[pos + 3]};
    pos += 4;
    if (packed.size() - pos < n) return std::nullopt;
    out.emplace_back(packed.begin() + static_cast<std::ptrdiff_t>(pos),
                     packed.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace protoforge
