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

#include "protoforge/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <memory>
#include <sstream>

#include "protoforge/error.hpp"

namespace protoforge::crypto {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

constexpr std::size_t kIvSize = 16;
constexpr std::size_t kMacSize = 32;

[[noreturn]] void crypto_fail(const std::string& what) { throw Error(Errc::CryptoFailure, what); }

const EVP_CIPHER* cipher_for(std::string_view algorithm, std::size_t keySize) {
  const EVP_CIPHER* cipher = nullptr;
  std::size_t expected = 0;
  if (algorithm == "sym:aes-128-cbc") {
    cipher = EVP_aes_128_cbc();
    expected = 16;
  } else if (algorithm == "sym:aes-256-cbc") {
    cipher = EVP_aes_256_cbc();
    expected = 32;
  } else {
    crypto_fail("unsupported symmetric algorithm '" + std::string(algorithm) + "'");
  }
  if (keySize != expected) {
    crypto_fail(std::string(algorithm) + " needs a " + std::to_string(expected) + "-byte key, got " +
                std::to_string(keySize));
  }
  return cipher;
}

Bytes sha256(ByteView data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) crypto_fail("SHA-256 failed");
  out.resize(len);
  return out;
}

Bytes mac(ByteView key, ByteView data) {
  static constexpr std::string_view kLabel = "protoforge-mac";
  Bytes labelled(kLabel.begin(), kLabel.end());
  labelled.insert(labelled.end(), key.begin(), key.end());
  const auto macKey = sha256(labelled);
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), macKey.data(), static_cast<int>(macKey.size()), data.data(), data.size(), out.data(), &len) ==
      nullptr) {
    crypto_fail("HMAC failed");
  }
  out.resize(len);
  return out;
}

Pkey load_key(const KeyMaterial& key, bool needPrivate) {
  const unsigned char* p = key.bytes.data();
  const auto len = static_cast<long>(key.bytes.size());
  Pkey pkey;
  if (key.keyClass == KeyClass::RsaPrivate) {
    pkey.reset(d2i_AutoPrivateKey(nullptr, &p, len));
  } else if (key.keyClass == KeyClass::RsaPublic) {
    if (needPrivate) crypto_fail("operation needs a private key");
    pkey.reset(d2i_PUBKEY(nullptr, &p, len));
  } else {
    crypto_fail("expected an RSA key, got a symmetric key");
  }
  if (!pkey) crypto_fail("malformed RSA key material");
  return pkey;
}

void require_token(std::string_view algorithm, std::string_view expected) {
  if (algorithm != expected) crypto_fail("unsupported algorithm '" + std::string(algorithm) + "'");
}

}  // namespace

std::string_view to_token(KeyClass k) noexcept {
  switch (k) {
    case KeyClass::Symmetric: return "sym";
    case KeyClass::RsaPrivate: return "rsa-private";
    case KeyClass::RsaPublic: return "rsa-public";
  }
  return "?";
}

Bytes OpenSslProvider::random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) crypto_fail("RAND_bytes failed");
  return out;
}

Bytes OpenSslProvider::sym_encrypt(std::string_view algorithm, ByteView key, ByteView plaintext) {
  const auto* cipher = cipher_for(algorithm, key.size());
  auto out = random_bytes(kIvSize);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key.data(), out.data()) != 1) crypto_fail("cipher init");
  out.resize(kIvSize + plaintext.size() + kIvSize);
  int len = 0;
  int total = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data() + kIvSize, &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1) {
    crypto_fail("encrypt update");
  }
  total = len;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kIvSize + total, &len) != 1) crypto_fail("encrypt final");
  total += len;
  out.resize(kIvSize + static_cast<std::size_t>(total));
  const auto tag = mac(key, out);
  out.insert(out.end(), tag.begin(), tag.end());
  return out;
}

Bytes OpenSslProvider::sym_decrypt(std::string_view algorithm, ByteView key, ByteView ciphertext) {
  const auto* cipher = cipher_for(algorithm, key.size());
  if (ciphertext.size() < kIvSize + 16 + kMacSize || (ciphertext.size() - kMacSize) % 16 != 0) {
    throw Error(Errc::DecryptionFailure, "ciphertext has an invalid length");
  }
  const auto body = ciphertext.first(ciphertext.size() - kMacSize);
  const auto tag = ciphertext.last(kMacSize);
  const auto expected = mac(key, body);
  if (CRYPTO_memcmp(expected.data(), tag.data(), kMacSize) != 0) {
    throw Error(Errc::DecryptionFailure, "integrity check failed");
  }
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, key.data(), body.data()) != 1) crypto_fail("cipher init");
  Bytes out(body.size());
  int len = 0;
  int total = 0;
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data() + kIvSize, static_cast<int>(body.size() - kIvSize)) != 1) {
    throw Error(Errc::DecryptionFailure, "decrypt update failed");
  }
  total = len;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    throw Error(Errc::DecryptionFailure, "bad padding");
  }
  total += len;
  out.resize(static_cast<std::size_t>(total));
  return out;
}

Bytes OpenSslProvider::asym_encrypt(std::string_view algorithm, const KeyMaterial& publicKey, ByteView plaintext) {
  require_token(algorithm, "asym:rsa-2048-oaep");
  const auto key = load_key(publicKey, false);
  PkeyCtx ctx(EVP_PKEY_CTX_new(key.get(), nullptr));
  if (!ctx || EVP_PKEY_encrypt_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_oaep_md(ctx.get(), EVP_sha256()) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(ctx.get(), EVP_sha256()) != 1) {
    crypto_fail("OAEP init");
  }
  std::size_t len = 0;
  if (EVP_PKEY_encrypt(ctx.get(), nullptr, &len, plaintext.data(), plaintext.size()) != 1) crypto_fail("OAEP size");
  Bytes out(len);
  if (EVP_PKEY_encrypt(ctx.get(), out.data(), &len, plaintext.data(), plaintext.size()) != 1) {
    crypto_fail("OAEP encryption failed (plaintext too long?)");
  }
  out.resize(len);
  return out;
}

Bytes OpenSslProvider::asym_decrypt(std::string_view algorithm, const KeyMaterial& privateKey, ByteView ciphertext) {
  require_token(algorithm, "asym:rsa-2048-oaep");
  const auto key = load_key(privateKey, true);
  PkeyCtx ctx(EVP_PKEY_CTX_new(key.get(), nullptr));
  if (!ctx || EVP_PKEY_decrypt_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_oaep_md(ctx.get(), EVP_sha256()) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(ctx.get(), EVP_sha256()) != 1) {
    crypto_fail("OAEP init");
  }
  std::size_t len = 0;
  if (EVP_PKEY_decrypt(ctx.get(), nullptr, &len, ciphertext.data(), ciphertext.size()) != 1) {
    throw Error(Errc::DecryptionFailure, "OAEP decryption failed");
  }
  Bytes out(len);
  if (EVP_PKEY_decrypt(ctx.get(), out.data(), &len, ciphertext.data(), ciphertext.size()) != 1) {
    throw Error(Errc::DecryptionFailure, "OAEP decryption failed");
  }
  out.resize(len);
  return out;
}

Bytes OpenSslProvider::sign(std::string_view algorithm, const KeyMaterial& privateKey, ByteView message) {
  require_token(algorithm, "sig:rsa-2048-pss");
  const auto key = load_key(privateKey, true);
  MdCtx md(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md || EVP_DigestSignInit(md.get(), &pctx, EVP_sha256(), nullptr, key.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, pss_salt_length()) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(pctx, EVP_sha256()) != 1) {
    crypto_fail("PSS init");
  }
  std::size_t len = 0;
  if (EVP_DigestSign(md.get(), nullptr, &len, message.data(), message.size()) != 1) crypto_fail("PSS size");
  Bytes out(len);
  if (EVP_DigestSign(md.get(), out.data(), &len, message.data(), message.size()) != 1) crypto_fail("PSS signing");
  out.resize(len);
  return out;
}

bool OpenSslProvider::verify_signature(std::string_view algorithm, const KeyMaterial& key, ByteView message,
                                       ByteView signature) {
  require_token(algorithm, "sig:rsa-2048-pss");
  const auto pkey = load_key(key, false);
  MdCtx md(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md || EVP_DigestVerifyInit(md.get(), &pctx, EVP_sha256(), nullptr, pkey.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_AUTO) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(pctx, EVP_sha256()) != 1) {
    crypto_fail("PSS init");
  }
  return EVP_DigestVerify(md.get(), signature.data(), signature.size(), message.data(), message.size()) == 1;
}

Bytes OpenSslProvider::hash(std::string_view algorithm, ByteView data) {
  require_token(algorithm, "hash:sha-256");
  return sha256(data);
}

Bytes DeterministicProvider::random_bytes(std::size_t n) {
  std::lock_guard lock(mutex_);
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng_() & 0xff);
  return out;
}

std::pair<Bytes, Bytes> generate_rsa_keypair(unsigned bits) {
  Pkey key(EVP_RSA_gen(bits));
  if (!key) crypto_fail("RSA key generation failed");
  unsigned char* buf = nullptr;
  int len = i2d_PrivateKey(key.get(), &buf);
  if (len <= 0) crypto_fail("private key encoding failed");
  Bytes priv(buf, buf + len);
  OPENSSL_free(buf);
  buf = nullptr;
  len = i2d_PUBKEY(key.get(), &buf);
  if (len <= 0) crypto_fail("public key encoding failed");
  Bytes pub(buf, buf + len);
  OPENSSL_free(buf);
  return {std::move(priv), std::move(pub)};
}

Keystore Keystore::parse(std::string_view text) {
  Keystore ks;
  std::size_t lineNo = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string tag, id, cls, material, extra;
    fields >> tag >> id >> cls >> material;
    const auto where = "keystore line " + std::to_string(lineNo) + ": ";
    if (tag != "key" || material.empty() || (fields >> extra)) {
      throw Error(Errc::KeystoreError, where + "expected 'key <id> <alg-class> <base64-material>'");
    }
    KeyMaterial km;
    if (cls == "sym") {
      km.keyClass = KeyClass::Symmetric;
    } else if (cls == "rsa-private") {
      km.keyClass = KeyClass::RsaPrivate;
    } else if (cls == "rsa-public") {
      km.keyClass = KeyClass::RsaPublic;
    } else {
      throw Error(Errc::KeystoreError, where + "unknown algorithm class '" + cls + "'");
    }
    auto bytes = base64_decode(material);
    if (!bytes || bytes->empty()) throw Error(Errc::KeystoreError, where + "key material is not valid base64");
    km.bytes = std::move(*bytes);
    if (ks.contains(id)) throw Error(Errc::KeystoreError, where + "duplicate key id '" + id + "'");
    ks.add(id, std::move(km));
  }
  return ks;
}

Keystore Keystore::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void Keystore::add(std::string id, KeyMaterial material) { keys_.insert_or_assign(std::move(id), std::move(material)); }

const KeyMaterial* Keystore::find(std::string_view id) const {
  const auto it = keys_.find(id);
  return it == keys_.end() ? nullptr : &it->second;
}

void Keystore::remove(std::string_view id) {
  const auto it = keys_.find(id);
  if (it != keys_.end()) keys_.erase(it);
}

std::string Keystore::serialize() const {
  std::string out;
  for (const auto& [id, km] : keys_) {
    out += "key " + id + " " + std::string(to_token(km.keyClass)) + " " + base64_encode(km.bytes) + "\n";
  }
  return out;
}

}  // namespace protoforge::crypto
