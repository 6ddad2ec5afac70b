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

#include <fstream>

#include "protoforge/harness.hpp"
#include "support.hpp"

namespace {

using namespace protoforge;
using namespace protoforge::harness;
using namespace std::chrono_literals;

// Reference timings, in thousandths of a millisecond:
// label, S-PR, M-CON, M-PR, printed Total.
struct ReferenceRow {
  const char* label;
  std::int64_t spr, mcon, mpr, total;
};
constexpr ReferenceRow kReferenceRows[] = {
    {"BAN Init.", 14580, 11810, 3680, 30080},      {"BAN Resp.", 14030, 2860, 1620, 18520},
    {"ISO9798 Init.", 13070, 35784, 23300, 72160}, {"ISO9798 Resp.", 13510, 6876, 12240, 32630},
    {"Kerb. Init. 1", 22630, 830, 0, 23470},       {"Kerb. Init. 2", 12610, 550, 1580, 14760},
    {"Kerb. Init. 3", 2230, 3340, 940, 6520},      {"Kerb. Resp. 1", 19280, 0, 410, 19690},
    {"Kerb. Resp. 2", 10810, 3379, 1670, 15870},   {"Kerb. Resp. 3", 5250, 11410, 3590, 20260},
};

RunOptions seeded(std::uint64_t seed) {
  RunOptions o;
  o.seed = seed;
  return o;
}

TEST(ReferenceTimings, RowsAreAdditiveWithinRounding) {
  for (const auto& r : kReferenceRows) {
    EXPECT_LE(std::llabs(r.total - (r.spr + r.mcon + r.mpr)), 20) << r.label;
  }
}

TEST(Bundles, LoadByNameAndPath) {
  const auto names = available_bundles();
  EXPECT_EQ(names, (std::vector<std::string>{"ban", "iso9798", "kerberos"}));
  const auto byName = load_bundle("kerberos");
  const auto byPath = load_bundle(pft::protocols() / "kerberos");
  EXPECT_EQ(byName.roles.size(), 3u);
  EXPECT_EQ(byPath.roles.size(), 3u);
  ASSERT_NE(byName.find("kdc"), nullptr);
  EXPECT_EQ(byName.find("kdc")->label, "Kerb. Resp.");
  EXPECT_TRUE(byName.find("kdc")->seqspec.is_absolute());
  EXPECT_EQ(byName.find("nobody"), nullptr);
}

TEST(Bundles, Errors) {
  try {
    (void)load_bundle("does-not-exist");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoError);
  }
  const auto dir = std::filesystem::temp_directory_path() / "protoforge-bad-bundle";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bundle.json") << "{ not json";
  try {
    (void)load_bundle(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
  }
  std::ofstream(dir / "bundle.json") << R"({"name": "x", "roles": [{"role": "a"}]})";
  EXPECT_THROW((void)load_bundle(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST(Bundles, Routes) {
  const auto roles = load_roles(load_bundle("kerberos"));
  const auto client = routes(roles, "client");
  EXPECT_EQ(client.at("KrbAsRequest"), "kdc");
  EXPECT_EQ(client.at("KrbAsReply"), "kdc");
  EXPECT_EQ(client.at("KrbApRequest"), "server");
  EXPECT_EQ(client.at("KrbApReply"), "server");
  const auto server = routes(roles, "server");
  EXPECT_EQ(server.size(), 2u);
  for (const auto& r : roles) EXPECT_EQ(starts_with_input(r.specs.plan), r.entry.role != "client");
}

void expect_agreement(const RunResult& run, const std::string& concept_name) {
  const Bytes* first = nullptr;
  for (const auto& r : run.roles) {
    ASSERT_TRUE(r.outcome.ok()) << r.role << ": " << r.outcome.failure->message;
    const auto it = r.bindings.find(concept_name);
    ASSERT_NE(it, r.bindings.end()) << r.role;
    if (first == nullptr) first = &it->second;
    EXPECT_EQ(it->second, *first) << r.role;
    for (const auto& e : r.outcome.effects) EXPECT_TRUE(e.satisfied);
  }
}

TEST(Runs, ShippedProtocolsSucceed) {
  expect_agreement(run_inproc(load_bundle("ban")), "SessionKey");
  expect_agreement(run_inproc(load_bundle("kerberos")), "SessionKey");
  const auto iso = run_inproc(load_bundle("iso9798"));
  ASSERT_TRUE(iso.ok());
  // Each side authenticates the other's nonce.
  EXPECT_EQ(iso.find("initiator")->bindings.at("Nb"), iso.find("responder")->bindings.at("Nb"));
  EXPECT_EQ(iso.find("initiator")->bindings.at("Na"), iso.find("responder")->bindings.at("Na"));
}

TEST(Runs, TranscriptsMirrorEachOther) {
  const auto run = run_inproc(load_bundle("ban"), seeded(5));
  const auto& a = run.find("initiator")->transcript;
  const auto& b = run.find("responder")->transcript;
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a[i].envelope, b[i].envelope);
    EXPECT_NE(a[i].direction, b[i].direction);
  }
}

TEST(Runs, SeededRunsAreReproducible) {
  for (const auto* proto : {"ban", "iso9798", "kerberos"}) {
    const auto roles = load_roles(load_bundle(proto));
    const auto a = run_inproc(roles, seeded(99));
    const auto b = run_inproc(roles, seeded(99));
    ASSERT_TRUE(a.ok());
    for (const auto& r : a.roles) EXPECT_EQ(r.transcript, b.find(r.role)->transcript) << proto << " " << r.role;
  }
}

TEST(Runs, TcpMatchesInProcUnderSeed) {
  for (const auto* proto : {"ban", "iso9798"}) {
    const auto roles = load_roles(load_bundle(proto));
    const auto tcp = run_tcp_pair(roles, seeded(11));
    const auto mem = run_inproc(roles, seeded(11));
    ASSERT_TRUE(tcp.ok()) << proto;
    for (const auto& r : tcp.roles) EXPECT_EQ(r.transcript, mem.find(r.role)->transcript) << proto << " " << r.role;
  }
}

// Flips one byte of one element of one message on its way out.
TransportWrapper corrupt(std::string message, std::string element, std::size_t index, bool* hit) {
  return [=](const std::string&, std::unique_ptr<transport::Transport> inner) -> std::unique_ptr<transport::Transport> {
    return std::make_unique<transport::InterceptingTransport>(std::move(inner), [=](std::string_view, Bytes& wire) {
      auto env = envelope::decode(to_string(wire));
      if (env.message != message) return;
      for (auto& [name, value] : env.elements) {
        if (name == element && index < value.size()) {
          value[index] ^= 0x01;
          *hit = true;
        }
      }
      wire = to_bytes(envelope::encode(env));
    });
  };
}

TEST(Runs, TamperedCiphertextAlwaysFails) {
  const auto roles = load_roles(load_bundle("ban"));
  const auto clean = run_inproc(roles, seeded(3));
  ASSERT_TRUE(clean.ok());
  struct Target {
    std::string sender, message, element;
  };
  const std::vector<Target> targets{{"responder", "Msg2Response", "EncTerm1"}, {"initiator", "Msg3Request", "EncTerm2"}};
  int injections = 0;
  for (const auto& t : targets) {
    Bytes original;
    for (const auto& e : clean.find(t.sender)->transcript) {
      if (e.message == t.message) original = *envelope::decode(to_string(e.envelope)).find(t.element);
    }
    ASSERT_FALSE(original.empty());
    for (std::size_t i = 0; i < original.size(); i += 7) {
      bool hit = false;
      RunOptions opts{.seed = 3, .timeout = 2000ms, .wrap = corrupt(t.message, t.element, i, &hit)};
      const auto run = run_inproc(roles, opts);
      ASSERT_TRUE(hit);
      ++injections;
      EXPECT_FALSE(run.ok()) << t.element << " byte " << i;
      const auto* receiver = run.find(t.sender == "responder" ? "initiator" : "responder");
      ASSERT_FALSE(receiver->outcome.ok());
      const auto code = receiver->outcome.failure->code;
      EXPECT_TRUE(code == Errc::DecryptionFailure || code == Errc::VerificationMismatch) << static_cast<int>(code);
    }
  }
  EXPECT_GT(injections, 20);
}

TEST(Runs, TamperedSignatureFails) {
  const auto roles = load_roles(load_bundle("iso9798"));
  bool hit = false;
  const auto run = run_inproc(roles, {.seed = 3, .timeout = 2000ms, .wrap = corrupt("Msg2Response", "SigTerm1", 300, &hit)});
  ASSERT_TRUE(hit);
  ASSERT_FALSE(run.find("initiator")->outcome.ok());
  EXPECT_EQ(run.find("initiator")->outcome.failure->step, 2u);
}

TEST(Bench, RowsAreAdditiveAndLabelled) {
  std::vector<ProtocolBundle> bundles;
  for (const auto& p : pft::shipped_protocols()) bundles.push_back(load_bundle(p));
  const auto table = bench(bundles, 3);
  EXPECT_TRUE(table.errors.empty());
  std::vector<std::string> labels;
  for (const auto& r : table.rows) {
    labels.push_back(r.roleLabel);
    EXPECT_GE(r.sPrUs, 0);
    EXPECT_GE(r.mConUs, 0);
    EXPECT_GE(r.mPrUs, 0);
    EXPECT_EQ(r.totalUs(), r.sPrUs + r.mConUs + r.mPrUs);
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"BAN Init.", "BAN Resp.", "ISO9798 Init.", "ISO9798 Resp.",
                                              "Kerb. Init. 1", "Kerb. Resp. 1", "Kerb. Init. 2", "Kerb. Resp. 2"}));
  const auto text = table.render();
  EXPECT_EQ(text.substr(0, text.find('\n')), "Protocol participant |  S-PR (ms) | M-CON (ms) |  M-PR (ms) | Total (ms)");
  const auto tsv = table.render_tsv();
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "participant\tS-PR\tM-CON\tM-PR\tTotal");
  EXPECT_THROW((void)bench(bundles, 0), Error);
}

TEST(Bench, ExchangeRowsPartitionRoleTimings) {
  const auto roles = load_roles(load_bundle("kerberos"));
  const auto run = run_inproc(roles);
  ASSERT_TRUE(run.ok());
  const auto rows = exchange_rows(roles, run);
  // The client's two rows add up to its whole-run timing.
  std::int64_t mcon = 0, mpr = 0, spr = 0;
  for (const auto& r : rows) {
    if (r.roleLabel.rfind("Kerb. Init.", 0) == 0) {
      mcon += r.mConUs;
      mpr += r.mPrUs;
      spr += r.sPrUs;
    }
  }
  const auto& client = run.find("client")->outcome.timing;
  EXPECT_EQ(mcon, client.mConUs);
  EXPECT_EQ(mpr, client.mPrUs);
  EXPECT_EQ(spr, client.sPrUs);
}

}  // namespace
