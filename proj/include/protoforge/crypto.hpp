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
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

#include "protoforge/bytes.hpp"

namespace protoforge::crypto {

enum class KeyClass : std::uint8_t { Symmetric, RsaPrivate, RsaPublic };

std::string_view to_token(KeyClass k) noexcept;

struct KeyMaterial {
  KeyClass keyClass = KeyClass::Symmetric;
  Bytes bytes;  // raw key, PKCS#8 DER or SubjectPublicKeyInfo DER
};

/// Abstract provider. Implementations must be safe to share between
/// concurrently running sessions. Failures are reported as
/// Error(DecryptionFailure) for integrity/padding failures and
/// Error(CryptoFailure) for everything else.
class CryptoProvider {
 public:
  virtual ~CryptoProvider() = default;

  virtual Bytes random_bytes(std::size_t n) = 0;

  virtual Bytes sym_encrypt(std::string_view algorithm, ByteView key, ByteView plaintext) = 0;
  virtual Bytes sym_decrypt(std::string_view algorithm, ByteView key, ByteView ciphertext) = 0;

  virtual Bytes asym_encrypt(std::string_view algorithm, const KeyMaterial& publicKey, ByteView plaintext) = 0;
  virtual Bytes asym_decrypt(std::string_view algorithm, const KeyMaterial& privateKey, ByteView ciphertext) = 0;

  virtual Bytes sign(std::string_view algorithm, const KeyMaterial& privateKey, ByteView message) = 0;
  /// Accepts either half of the key pair.
  virtual bool verify_signature(std::string_view algorithm, const KeyMaterial& key, ByteView message,
                                ByteView signature) = 0;

  virtual Bytes hash(std::string_view algorithm, ByteView data) = 0;
};

/// AES-CBC (with an HMAC-SHA-256 trailer), RSA-OAEP, RSA-PSS and SHA-256
/// through OpenSSL.
///
/// Symmetric ciphertext layout: IV(16) || AES-CBC-PKCS7(plaintext) ||
/// HMAC-SHA-256(SHA-256("protoforge-mac" || key), IV || body). The trailer
/// makes every corruption of a CBC ciphertext detectable.
class OpenSslProvider : public CryptoProvider {
 public:
  Bytes random_bytes(std::size_t n) override;
  Bytes sym_encrypt(std::string_view algorithm, ByteView key, ByteView plaintext) override;
  Bytes sym_decrypt(std::string_view algorithm, ByteView key, ByteView ciphertext) override;
  Bytes asym_encrypt(std::string_view algorithm, const KeyMaterial& publicKey, ByteView plaintext) override;
  Bytes asym_decrypt(std::string_view algorithm, const KeyMaterial& privateKey, ByteView ciphertext) override;
  Bytes sign(std::string_view algorithm, const KeyMaterial& privateKey, ByteView message) override;
  bool verify_signature(std::string_view algorithm, const KeyMaterial& key, ByteView message,
                        ByteView signature) override;
  Bytes hash(std::string_view algorithm, ByteView data) override;

 protected:
  virtual int pss_salt_length() const { return 32; }
};

/// Test provider: randomness comes from a seeded generator and PSS
/// signatures use an empty salt, so a run is reproducible byte for byte.
/// RSA-OAEP encryption stays randomized.
class DeterministicProvider : public OpenSslProvider {
 public:
  explicit DeterministicProvider(std::uint64_t seed) : rng_(seed) {}

  Bytes random_bytes(std::size_t n) override;

 protected:
  int pss_salt_length() const override { return 0; }

 private:
  std::mutex mutex_;
  std::mt19937_64 rng_;
};

/// Generates an RSA key pair; returns {PKCS#8 private DER, SPKI public DER}.
std::pair<Bytes, Bytes> generate_rsa_keypair(unsigned bits);

/// Per-role key storage. File format, one entry per line:
///   key <id> <sym|rsa-private|rsa-public> <base64-material>
/// Blank lines and '#' comments are ignored.
class Keystore {
 public:
  static Keystore parse(std::string_view text);
  static Keystore load(const std::filesystem::path& path);

  void add(std::string id, KeyMaterial material);
  [[nodiscard]] const KeyMaterial* find(std::string_view id) const;
  [[nodiscard]] bool contains(std::string_view id) const { return find(id) != nullptr; }
  [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
  void remove(std::string_view id);

  [[nodiscard]] std::string serialize() const;

 private:
  std::map<std::string, KeyMaterial, std::less<>> keys_;
};

}  // namespace protoforge::crypto
