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

#include <map>
#include <set>

#include "protoforge/planner.hpp"
#include "support.hpp"

namespace {

using namespace protoforge;
using namespace protoforge::plan;
using onto::Cardinality;
using onto::LiteralKind;

struct Pair {
  seqspec::RoleSpec role;
  semspec::SemSpec spec;
};

Pair load(const std::string& proto, const std::string& role, const std::string& semOverride = {}) {
  const auto bundle = harness::load_bundle(proto);
  const auto* e = bundle.find(role);
  return {seqspec::parse_seqspec(read_file(e->seqspec)),
          semspec::parse_semspec(semOverride.empty() ? read_file(e->semspec) : semOverride)};
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

Errc plan_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::IoError;
}

std::vector<ActionKind> kinds(const TermPlan& tp) {
  std::vector<ActionKind> out;
  for (const auto& a : tp.actions) out.push_back(a.kind);
  return out;
}

TEST(Planner, BanInitiatorMatchesGolden) {
  const auto [role, spec] = load("ban", "initiator");
  const auto plan = plan_role(role, spec);
  EXPECT_EQ(dump(plan), read_file(std::string(PROTOFORGE_GOLDEN_DIR) + "/ban_initiator.plan"));
  ASSERT_EQ(plan.steps.size(), 4u);
  const std::vector<Direction> dirs{Direction::Output, Direction::Input, Direction::Output, Direction::Input};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(plan.steps[i].direction, dirs[i]);
    EXPECT_EQ(plan.steps[i].operation, "Msg" + std::to_string(i + 1));
  }
}

TEST(Planner, RandomNonceElement) {
  const auto [role, spec] = load("ban", "initiator");
  const auto tp = plan_element(spec.model().require("Sent_Na"), Direction::Output, spec);
  EXPECT_EQ(kinds(tp), (std::vector<ActionKind>{ActionKind::GenerateRandom, ActionKind::StoreBinding, ActionKind::TypeCheck}));
  EXPECT_EQ(tp.actions[0].lengthBits, 128u);
  EXPECT_EQ(tp.actions[1].target.concept_name, "Na");
  EXPECT_EQ(tp.actions[2].typeTag, "nonce");
}

TEST(Planner, EncryptedTermOnInput) {
  const auto [role, spec] = load("ban", "initiator");
  const auto tp = plan_element(spec.model().require("EncTerm1"), Direction::Input, spec);
  ASSERT_EQ(kinds(tp), (std::vector<ActionKind>{ActionKind::TypeCheck, ActionKind::DecryptUnder}));
  const auto& dec = tp.actions[1];
  EXPECT_EQ(dec.algorithm, "sym:aes-128-cbc");
  EXPECT_EQ(dec.key.concept_name, "Kab");
  EXPECT_EQ(dec.key.keystoreItem, "Kab");
  ASSERT_EQ(dec.payload.size(), 2u);
  EXPECT_EQ(kinds(dec.payload[0]),
            (std::vector<ActionKind>{ActionKind::ExtractComponent, ActionKind::TypeCheck, ActionKind::VerifyEquality}));
  EXPECT_EQ(dec.payload[0].actions[2].target.concept_name, "Na");
  EXPECT_EQ(kinds(dec.payload[1]),
            (std::vector<ActionKind>{ActionKind::ExtractComponent, ActionKind::TypeCheck, ActionKind::StoreBinding}));
  EXPECT_EQ(dec.payload[1].actions[0].position, 1u);
  EXPECT_EQ(dec.payload[1].actions[2].target.concept_name, "SessionKey");
}

TEST(Planner, SignedTermsUseSignatureActions) {
  const auto [role, spec] = load("iso9798", "initiator");
  const auto plan = plan_role(role, spec);
  std::set<ActionKind> seen;
  for (const auto* a : flatten(plan)) seen.insert(a->kind);
  EXPECT_TRUE(seen.count(ActionKind::SignUnder));
  EXPECT_TRUE(seen.count(ActionKind::VerifySignature));
  EXPECT_FALSE(seen.count(ActionKind::EncryptUnder));
}

TEST(Planner, MissingKeyAlgorithmAndLength) {
  const auto bundle = harness::load_bundle("ban");
  const auto sem = read_file(bundle.find("initiator")->semspec);
  const auto noKey = semspec::parse_semspec(
      replace_once(sem, R"(<Property name="hasKey" domain="EncTerm1" range="Kab" min="1" max="1"/>)", ""));
  EXPECT_EQ(plan_code([&] { (void)plan_element(noKey.model().require("EncTerm1"), Direction::Input, noKey); }),
            Errc::MissingKeyProperty);

  const auto noAlg = semspec::parse_semspec(replace_once(
      sem, R"(<Property name="hasSymmetricAlgorithm" domain="EncTerm2" range="AES128CBC" min="1" max="1"/>)", ""));
  EXPECT_EQ(plan_code([&] { (void)plan_element(noAlg.model().require("EncTerm2"), Direction::Output, noAlg); }),
            Errc::MissingAlgorithm);

  const auto badAlg = semspec::parse_semspec(replace_once(sem, R"(value="sym:aes-128-cbc")", R"(value="sym:rot13")"));
  EXPECT_EQ(plan_code([&] { (void)plan_element(badAlg.model().require("EncTerm2"), Direction::Output, badAlg); }),
            Errc::MissingAlgorithm);

  for (const auto* len : {"100", "0", "-8", "abc"}) {
    const auto badLen = semspec::parse_semspec(replace_once(
        sem, R"(domain="Sent_Na" range="lit:natural" min="1" max="1" value="128")",
        std::string(R"(domain="Sent_Na" range="lit:natural" min="1" max="1" value=")") + len + "\""));
    EXPECT_EQ(plan_code([&] { (void)plan_element(badLen.model().require("Sent_Na"), Direction::Output, badLen); }),
              Errc::InvalidLength)
        << len;
  }
}

TEST(Planner, OutputWithoutSourceIsUnresolvable) {
  const auto [role, spec] = load("ban", "initiator");
  EXPECT_EQ(plan_code([&] { (void)plan_element(spec.model().require("Recv_Nb"), Direction::Output, spec); }),
            Errc::UnresolvableReference);
}

TEST(Planner, VerifyingAnUngeneratedNonceIsUnsatisfiable) {
  const auto bundle = harness::load_bundle("ban");
  const auto* e = bundle.find("responder");
  const auto sem = replace_once(read_file(e->semspec),
                                R"(<Property name="isStored" domain="Recv_Na" range="Na" min="1" max="1"/>)",
                                R"(<Property name="isVerified" domain="Recv_Na" range="Na" min="1" max="1"/>)");
  const auto role = seqspec::parse_seqspec(read_file(e->seqspec));
  const auto spec = semspec::parse_semspec(sem);
  try {
    (void)plan_role(role, spec);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::DependencyUnsatisfiable);
    EXPECT_NE(std::string(err.what()).find("Na"), std::string::npos);
  }
}

TEST(Planner, RuleViolationsRejectTheSpec) {
  const auto bundle = harness::load_bundle("ban");
  const auto* e = bundle.find("initiator");
  const auto sem = replace_once(read_file(e->semspec),
                                R"(<Property name="isLoaded" domain="Kab" range="Keystore" min="1" max="1"/>)", "");
  const auto role = seqspec::parse_seqspec(read_file(e->seqspec));
  try {
    (void)plan_role(role, semspec::parse_semspec(sem));
    FAIL();
  } catch (const SpecRejected& err) {
    EXPECT_EQ(err.code(), Errc::SpecRejected);
    ASSERT_EQ(err.diagnostics().size(), 1u);
    EXPECT_EQ(err.diagnostics()[0].rule.id, "R3");
    EXPECT_EQ(err.diagnostics()[0].subject, "Kab");
  }
}

// Chain of `wrappers` nested encrypted terms around a known leaf.
semspec::SemSpec nested(int wrappers) {
  auto b = semspec::scaffold_builder();
  const auto comm = *b.find("CommunicationTerm");
  const auto key = b.add_concept("K", *b.find("LoadedTerm"));
  const auto mod = b.add_concept("Store", *b.find("LoadingModule"));
  b.add_property("isLoaded", key, mod, Cardinality::exactly(1));
  b.add_property("hasLocator", mod, LiteralKind::ModuleRef, Cardinality::exactly(1), "keystore");
  const auto known = b.add_concept("Name", *b.find("KnownTerm"));
  b.add_property("isOfType", known, LiteralKind::TypeTag, Cardinality::exactly(1), "text");
  b.add_instance(known, "alice");
  auto outer = b.add_concept("E0", comm);
  for (int i = 0; i <= wrappers; ++i) {
    if (i > 0) {
      const auto inner = b.add_concept("E" + std::to_string(i), outer);
      b.add_property("isExtracted", inner, outer, Cardinality::exactly(1));
      outer = inner;
    }
    if (i < wrappers) {
      b.add_property("SymmEncrypted", outer, LiteralKind::Bytes, Cardinality::exactly(1));
      b.add_property("hasKey", outer, key, Cardinality::exactly(1));
      b.add_property("hasSymmetricAlgorithm", outer, LiteralKind::AlgRef, Cardinality::exactly(1), "sym:aes-128-cbc");
    } else {
      b.add_property("refersTo", outer, known, Cardinality::exactly(1));
    }
  }
  return semspec::SemSpec(b.build(), "http://protoforge.example/nested/SecProt.owl");
}

TEST(Planner, NestingDepthIsCapped) {
  const auto ok = nested(kMaxDepth);
  const auto tp = plan_element(ok.model().require("E0"), Direction::Output, ok);
  int depth = 0;
  for (const TermPlan* cur = &tp; !cur->actions.empty() && !cur->actions[0].payload.empty();
       cur = &cur->actions[0].payload[0]) {
    ++depth;
  }
  EXPECT_EQ(depth, kMaxDepth);
  const auto bad = nested(kMaxDepth + 1);
  EXPECT_EQ(plan_code([&] { (void)plan_element(bad.model().require("E0"), Direction::Output, bad); }),
            Errc::CyclicDependency);
  EXPECT_EQ(plan_code([&] { (void)plan_element(bad.model().require("E0"), Direction::Input, bad); }),
            Errc::CyclicDependency);
}

TEST(Planner, PlanningIsDeterministic) {
  for (const auto& proto : pft::shipped_protocols()) {
    for (const auto& e : harness::load_bundle(proto).roles) {
      const auto role = seqspec::parse_seqspec(read_file(e.seqspec));
      const auto spec = semspec::parse_semspec(read_file(e.semspec));
      const auto a = plan_role(role, spec);
      const auto b = plan_role(role, semspec::parse_semspec(read_file(e.semspec)));
      EXPECT_EQ(a, b);
      EXPECT_EQ(dump(a), dump(b));
      ASSERT_EQ(a.steps.size(), role.operations.size());
      for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].operation, role.operations[i].name);
    }
  }
}

// Symbolic replay: walk the actions in execution order with a set of bound
// concept names. Only literals, keystore contents and earlier stores may
// satisfy a read.
std::vector<std::string> unsound_reads(const RolePlan& plan, const crypto::Keystore& keys) {
  std::set<std::string> bound;
  std::vector<std::string> bad;
  const auto readable = [&](const ValueSource& v) {
    return bound.count(v.concept_name) || v.literal || (v.keystoreItem && keys.contains(*v.keystoreItem));
  };
  for (const auto* a : flatten(plan)) {
    switch (a->kind) {
      case ActionKind::RecallValue:
      case ActionKind::VerifyEquality:
        if (!readable(a->target)) bad.push_back(a->target.concept_name);
        break;
      case ActionKind::EncryptUnder:
      case ActionKind::DecryptUnder:
      case ActionKind::SignUnder:
      case ActionKind::VerifySignature:
        if (!readable(a->key)) bad.push_back(a->key.concept_name);
        break;
      case ActionKind::StoreBinding:
        bound.insert(a->target.concept_name);
        break;
      case ActionKind::LoadFromModule:
        if (!keys.contains(a->item)) bad.push_back(a->item);
        break;
      default:
        break;
    }
  }
  return bad;
}

TEST(Planner, DependencySoundnessOnShippedPlans) {
  for (const auto& proto : pft::shipped_protocols()) {
    for (const auto& e : harness::load_bundle(proto).roles) {
      const auto loaded = harness::load_role(e);
      EXPECT_TRUE(unsound_reads(loaded.specs.plan, loaded.keystore).empty()) << proto << "/" << e.role;
    }
  }
}

using CryptoKey = std::pair<std::string, std::string>;  // (algorithm, key concept)

void collect(const TermPlan& tp, ActionKind want, std::multiset<CryptoKey>& out) {
  for (const auto& a : tp.actions) {
    if (a.kind == want) out.emplace(a.algorithm, a.key.concept_name);
    for (const auto& p : a.payload) collect(p, want, out);
  }
}

std::multiset<CryptoKey> crypto_of(const RolePlan& plan, const std::string& message, Direction dir, ActionKind want) {
  std::multiset<CryptoKey> out;
  for (const auto& s : plan.steps) {
    if (s.message != message || s.direction != dir) continue;
    for (const auto& e : s.elements) collect(e.plan, want, out);
  }
  return out;
}

TEST(Planner, TwoPartyDuality) {
  for (const auto* proto : {"ban", "iso9798"}) {
    const auto roles = harness::load_roles(harness::load_bundle(proto));
    ASSERT_EQ(roles.size(), 2u);
    for (int s = 0; s < 2; ++s) {
      const auto& sender = roles[s].specs.plan;
      const auto& receiver = roles[1 - s].specs.plan;
      for (const auto& step : sender.steps) {
        if (step.direction != Direction::Output) continue;
        EXPECT_EQ(crypto_of(sender, step.message, Direction::Output, ActionKind::EncryptUnder),
                  crypto_of(receiver, step.message, Direction::Input, ActionKind::DecryptUnder))
            << proto << " " << step.message;
        EXPECT_EQ(crypto_of(sender, step.message, Direction::Output, ActionKind::SignUnder),
                  crypto_of(receiver, step.message, Direction::Input, ActionKind::VerifySignature))
            << proto << " " << step.message;
      }
    }
  }
}

TEST(Planner, FlattenOrdersPayloadByDirection) {
  const auto [role, spec] = load("ban", "initiator");
  const auto plan = plan_role(role, spec);
  const auto flat = flatten(plan);
  std::vector<std::string> order;
  for (const auto* a : flat) order.push_back(std::string(to_string(a->kind)) + ":" + a->subject);
  const auto at = [&](const std::string& s) {
    return std::find(order.begin(), order.end(), s) - order.begin();
  };
  // Output: the component is produced before it is encrypted.
  EXPECT_LT(at("RecallValue:EncTerm2_1_Na"), at("EncryptUnder:EncTerm2"));
  // Input: decryption comes before the components are examined.
  EXPECT_LT(at("DecryptUnder:EncTerm1"), at("VerifyEquality:EncTerm1_1_Na"));
}

}  // namespace
