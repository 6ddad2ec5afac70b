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

#include <gtest/gtest.h>

#include "protoforge/envelope.hpp"
#include "support.hpp"

namespace {

using namespace protoforge;
using namespace protoforge::envelope;

Errc decode_code(std::string_view wire) {
  try {
    (void)decode(wire);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << wire;
  return Errc::IoError;
}

TEST(Envelope, ExactWireForm) {
  Envelope env{"Msg1Request", {{"Participant A", to_bytes("A")}, {"Random", Bytes{0xff, 0x00}}}};
  EXPECT_EQ(encode(env),
            R"(<env:Envelope xmlns:env="urn:protoforge:env:1"><env:Message name="Msg1Request">)"
            R"(<env:Element name="Participant A" enc="base64">QQ==</env:Element>)"
            R"(<env:Element name="Random" enc="base64">/wA=</env:Element></env:Message></env:Envelope>)");
  EXPECT_EQ(decode(encode(env)), env);
  EXPECT_EQ(*env.find("Random"), (Bytes{0xff, 0x00}));
  EXPECT_EQ(env.find("Missing"), nullptr);
}

TEST(Envelope, RoundTripProperty) {
  pft::Rng rng;
  const std::string nameChars = "abcXYZ _-<&\"'";
  for (int i = 0; i < 300; ++i) {
    Envelope env;
    for (std::size_t k = 1 + rng.below(8); k > 0; --k) env.message += nameChars[rng.below(nameChars.size())];
    for (std::size_t n = rng.below(5); n > 0; --n) {
      std::string name;
      for (std::size_t k = 1 + rng.below(8); k > 0; --k) name += nameChars[rng.below(nameChars.size())];
      env.elements.emplace_back(name, rng.bytes(rng.below(64)));
    }
    const auto wire = encode(env);
    ASSERT_EQ(decode(wire), env) << wire;
  }
}

TEST(Envelope, RejectsAnythingButCanonicalBytes) {
  const Envelope env{"M", {{"E", to_bytes("hi")}}};
  const auto wire = encode(env);
  EXPECT_EQ(decode_code(R"(<?xml version="1.0" encoding="UTF-8"?>)" + wire), Errc::MalformedEnvelope);
  EXPECT_EQ(decode_code(wire + "\n"), Errc::MalformedEnvelope);
  std::string spaced = wire;
  spaced.insert(spaced.find("<env:Message"), " ");
  EXPECT_EQ(decode_code(spaced), Errc::MalformedEnvelope);
  std::string badEnc = wire;
  badEnc.replace(badEnc.find("base64"), 6, "hex123");
  EXPECT_EQ(decode_code(badEnc), Errc::MalformedEnvelope);
  std::string badB64 = wire;
  badB64.replace(badB64.find("aGk="), 4, "aGk");
  EXPECT_EQ(decode_code(badB64), Errc::MalformedEnvelope);
  std::string otherNs = wire;
  otherNs.replace(otherNs.find("urn:protoforge:env:1"), 20, "urn:protoforge:env:2");
  EXPECT_EQ(decode_code(otherNs), Errc::MalformedEnvelope);
  EXPECT_EQ(decode_code("<env:Envelope"), Errc::MalformedEnvelope);
  EXPECT_EQ(decode_code(""), Errc::MalformedEnvelope);
}

TEST(Framing, LengthPrefixAndStreaming) {
  const auto f = frame(to_bytes("abc"));
  EXPECT_EQ(f, (Bytes{0, 0, 0, 3, 'a', 'b', 'c'}));

  pft::Rng rng;
  std::vector<Bytes> payloads;
  Bytes stream;
  for (int i = 0; i < 20; ++i) {
    payloads.push_back(rng.bytes(rng.below(300)));
    const auto fr = frame(payloads.back());
    stream.insert(stream.end(), fr.begin(), fr.end());
  }
  // Feed the stream in random chunks.
  Bytes buffer;
  std::vector<Bytes> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    const auto n = std::min(stream.size() - pos, 1 + rng.below(50));
    buffer.insert(buffer.end(), stream.begin() + static_cast<std::ptrdiff_t>(pos),
                  stream.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    while (auto p = unframe(buffer)) got.push_back(*p);
  }
  EXPECT_EQ(got, payloads);
  EXPECT_TRUE(buffer.empty());
}

TEST(Framing, OversizedFrameIsRejected) {
  Bytes buffer{0xff, 0xff, 0xff, 0xff};
  EXPECT_THROW((void)unframe(buffer), Error);
}

}  // namespace
