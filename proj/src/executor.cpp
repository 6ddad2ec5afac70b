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

#include "protoforge/executor.hpp"

#include <cstdio>

#include "protoforge/semspec.hpp"
#include "protoforge/seqspec.hpp"

namespace protoforge::exec {

namespace {

using plan::ActionKind;
using plan::TermAction;
using plan::TermPlan;
using plan::ValueSource;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] std::int64_t elapsed_us() const {
    return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool valid_utf8(ByteView b) {
  std::size_t i = 0;
  while (i < b.size()) {
    const auto c = b[i];
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      n = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= b.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      if ((b[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b[i + k] & 0x3F);
    }
    const bool overlong = (n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += n + 1;
  }
  return true;
}

void type_check(const TermAction& a, ByteView v) {
  const auto& tag = a.typeTag;
  bool ok = false;
  if (tag == "text") {
    ok = !v.empty() && valid_utf8(v);
  } else if (tag == "bytes") {
    ok = true;
  } else if (tag == "nonce") {
    ok = v.size() >= 8;
  } else if (tag == "key") {
    ok = v.size() == 16 || v.size() == 32;
  } else if (tag == "ciphertext") {
    ok = v.size() >= 16;
  } else if (tag == "signed") {
    const auto parts = decode_components(v);
    ok = parts && parts->size() == 2;
  } else {
    throw Error(Errc::TypeCheckFailure, "'" + a.subject + "' uses unknown type tag '" + tag + "'");
  }
  if (!ok) {
    throw Error(Errc::TypeCheckFailure,
                "'" + a.subject + "' (" + std::to_string(v.size()) + " bytes) is not a valid " + tag);
  }
}

Bytes resolve(const ValueSource& s, const Session& session) {
  if (const auto* b = session.binding(s.concept_name)) return *b;
  if (s.literal) return to_bytes(*s.literal);
  if (s.keystoreItem) {
    if (const auto* km = session.keystore().find(*s.keystoreItem)) return km->bytes;
  }
  throw Error(Errc::MissingBinding, "no value for '" + s.concept_name + "'");
}

const crypto::KeyMaterial& keystore_key(const ValueSource& s, const Session& session) {
  const auto* km = s.keystoreItem ? session.keystore().find(*s.keystoreItem) : nullptr;
  if (km == nullptr) throw Error(Errc::MissingBinding, "key '" + s.concept_name + "' is not in the keystore");
  return *km;
}

bool symmetric(const TermAction& a) { return a.algorithm.rfind("sym:", 0) == 0; }

Bytes run_output(const TermPlan& tp, Session& session, crypto::CryptoProvider& cp) {
  Bytes cur;
  for (const auto& a : tp.actions) {
    switch (a.kind) {
      case ActionKind::GenerateRandom: cur = cp.random_bytes(a.lengthBits / 8); break;
      case ActionKind::LoadFromModule: {
        if (a.module != "keystore") throw Error(Errc::KeystoreError, "unsupported loading module '" + a.module + "'");
        const auto* km = session.keystore().find(a.item);
        if (km == nullptr) throw Error(Errc::MissingBinding, "keystore has no item '" + a.item + "'");
        cur = km->bytes;
        break;
      }
      case ActionKind::RecallValue: cur = resolve(a.target, session); break;
      case ActionKind::EncryptUnder:
      case ActionKind::SignUnder: {
        std::vector<Bytes> parts;
        for (const auto& p : a.payload) parts.push_back(run_output(p, session, cp));
        const auto packed = encode_components(parts);
        if (a.kind == ActionKind::SignUnder) {
          auto sig = cp.sign(a.algorithm, keystore_key(a.key, session), packed);
          const std::vector<Bytes> outer{packed, std::move(sig)};
          cur = encode_components(outer);
        } else if (symmetric(a)) {
          cur = cp.sym_encrypt(a.algorithm, resolve(a.key, session), packed);
        } else {
          cur = cp.asym_encrypt(a.algorithm, keystore_key(a.key, session), packed);
        }
        break;
      }
      case ActionKind::StoreBinding: session.bind(a.target.concept_name, cur); break;
      case ActionKind::TypeCheck: type_check(a, cur); break;
      default:
        throw Error(Errc::CryptoFailure, "action " + std::string(plan::to_string(a.kind)) + " is not valid on output");
    }
  }
  return cur;
}

void run_input(const TermPlan& tp, Bytes cur, const std::vector<Bytes>* parts, Session& session,
               crypto::CryptoProvider& cp) {
  for (const auto& a : tp.actions) {
    switch (a.kind) {
      case ActionKind::ExtractComponent:
        if (parts == nullptr || a.position >= parts->size()) {
          throw Error(Errc::TypeCheckFailure, "'" + a.target.concept_name + "' has no component " +
                                                  std::to_string(a.position) + " for '" + a.subject + "'");
        }
        cur = (*parts)[a.position];
        break;
      case ActionKind::TypeCheck: type_check(a, cur); break;
      case ActionKind::DecryptUnder:
      case ActionKind::VerifySignature: {
        Bytes packed;
        if (a.kind == ActionKind::VerifySignature) {
          const auto outer = decode_components(cur);
          if (!outer || outer->size() != 2) throw Error(Errc::TypeCheckFailure, "'" + a.subject + "' is not a signed term");
          if (!cp.verify_signature(a.algorithm, keystore_key(a.key, session), (*outer)[0], (*outer)[1])) {
            throw Error(Errc::VerificationMismatch, "signature on '" + a.subject + "' does not verify");
          }
          packed = (*outer)[0];
        } else if (symmetric(a)) {
          packed = cp.sym_decrypt(a.algorithm, resolve(a.key, session), cur);
        } else {
          packed = cp.asym_decrypt(a.algorithm, keystore_key(a.key, session), cur);
        }
        const auto comps = decode_components(packed);
        if (!comps || comps->size() != a.payload.size()) {
          throw Error(Errc::DecryptionFailure, "'" + a.subject + "' does not hold " +
                                                   std::to_string(a.payload.size()) + " components");
        }
        for (const auto& p : a.payload) run_input(p, {}, &*comps, session, cp);
        break;
      }
      case ActionKind::VerifyEquality:
        if (resolve(a.target, session) != cur) {
          throw Error(Errc::VerificationMismatch, a.target.concept_name + " (in '" + a.subject + "')");
        }
        break;
      case ActionKind::StoreBinding: session.bind(a.target.concept_name, cur); break;
      default:
        throw Error(Errc::CryptoFailure, "action " + std::string(plan::to_string(a.kind)) + " is not valid on input");
    }
  }
}

Diagnostic precondition_failure(const plan::Condition& c) {
  static const RuleDescriptor rule{"PRECONDITION", RuleCategory::Storage, RuleOrigin::Extrapolated,
                                   "precondition concepts are bound or loadable"};
  return Diagnostic{rule, c.source.concept_name,
                    "precondition '" + c.name + "' is not satisfiable: '" + c.source.concept_name +
                        "' is neither bound nor in the keystore",
                    Severity::Error};
}

}  // namespace

std::string TimingReport::format_ms(std::int64_t us) {
  const bool negative = us < 0;
  const auto mag = negative ? -us : us;
  const auto hundredths = (mag + 5) / 10;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", negative ? "-" : "", static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

const Bytes* Session::binding(std::string_view concept_name) const {
  const auto it = bindings_.find(concept_name);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Session::bind(const std::string& concept_name, Bytes value) {
  const auto [it, inserted] = bindings_.try_emplace(concept_name, std::move(value));
  if (!inserted && it->second != value) {
    throw Error(Errc::VerificationMismatch, concept_name + " is already bound to a different value");
  }
}

bool satisfiable(const ValueSource& source, const Session& session) {
  if (session.binding(source.concept_name) != nullptr || source.literal) return true;
  return source.keystoreItem && session.keystore().contains(*source.keystoreItem);
}

std::vector<Diagnostic> check_preconditions(const plan::RolePlan& plan, const Session& session) {
  std::vector<Diagnostic> out;
  for (const auto& c : plan.preconditions) {
    if (!satisfiable(c.source, session)) out.push_back(precondition_failure(c));
  }
  return out;
}

std::vector<Diagnostic> check_preconditions(const seqspec::RoleSpec& role, const semspec::SemSpec& spec,
                                            const Session& session) {
  std::vector<Diagnostic> out;
  for (const auto& a : role.preconditions) {
    const plan::Condition c{a.name, plan::value_source(semspec::resolve_reference(spec, a.modelReference), spec)};
    if (!satisfiable(c.source, session)) out.push_back(precondition_failure(c));
  }
  return out;
}

envelope::Envelope construct_message(const plan::MessageStep& step, Session& session, crypto::CryptoProvider& crypto) {
  if (step.direction != Direction::Output) throw Error(Errc::MessageNameMismatch, step.message + " is not an output");
  const Stopwatch sw;
  envelope::Envelope env;
  env.message = step.message;
  for (const auto& el : step.elements) {
    env.elements.emplace_back(el.element.name, run_output(el.plan, session, crypto));
  }
  session.timing.mConUs += sw.elapsed_us();
  return env;
}

void process_message(const plan::MessageStep& step, const envelope::Envelope& env, Session& session,
                     crypto::CryptoProvider& crypto) {
  const Stopwatch sw;
  if (step.direction != Direction::Input) throw Error(Errc::MessageNameMismatch, step.message + " is not an input");
  if (env.message != step.message) {
    throw Error(Errc::MessageNameMismatch, "expected " + step.message + ", received " + env.message);
  }
  if (env.elements.size() != step.elements.size()) {
    throw Error(Errc::MalformedEnvelope, step.message + " carries " + std::to_string(env.elements.size()) +
                                             " elements, expected " + std::to_string(step.elements.size()));
  }
  for (std::size_t i = 0; i < step.elements.size(); ++i) {
    const auto& [name, value] = env.elements[i];
    if (name != step.elements[i].element.name) {
      throw Error(Errc::MalformedEnvelope, "element " + std::to_string(i + 1) + " of " + step.message + " is '" +
                                               name + "', expected '" + step.elements[i].element.name + "'");
    }
    run_input(step.elements[i].plan, value, nullptr, session, crypto);
  }
  session.timing.mPrUs += sw.elapsed_us();
}

Outcome execute_role(const plan::RolePlan& plan, Session& session, transport::Transport& transport,
                     crypto::CryptoProvider& crypto, const ExecutionOptions& options) {
  Outcome out;
  // Effects are reported on every path so a failed run shows what it missed.
  const auto finish = [&](std::optional<Failure> f) {
    for (const auto& e : plan.effects) {
      const bool ok = session.binding(e.source.concept_name) != nullptr;
      out.effects.push_back({e.name, e.source.concept_name, ok});
      if (!ok && !f) {
        f = Failure{Errc::EffectNotAchieved, plan.steps.size(),
                    "effect '" + e.name + "' did not bind '" + e.source.concept_name + "'"};
      }
    }
    out.failure = std::move(f);
    out.timing = session.timing;
    return out;
  };

  if (const auto missing = check_preconditions(plan, session); !missing.empty()) {
    return finish(Failure{Errc::PreconditionFailed, 0, missing.front().message});
  }

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    StepRecord rec{step.direction, step.message, {}, 0, 0};
    const auto mCon0 = session.timing.mConUs;
    const auto mPr0 = session.timing.mPrUs;
    try {
      const auto peer = options.peers.find(step.message);
      if (peer == options.peers.end()) throw Error(Errc::IoError, "no peer exchanges " + step.message);
      rec.peer = peer->second;
      if (step.direction == Direction::Output) {
        auto env = construct_message(step, session, crypto);
        const Stopwatch sw;
        auto wire = to_bytes(envelope::encode(env));
        session.timing.mConUs += sw.elapsed_us();
        transport.send(rec.peer, wire);
        session.record(TranscriptEntry{step.direction, step.message, std::move(wire)});
      } else {
        auto wire = transport.receive(rec.peer, transport::Clock::now() + options.timeout);
        const Stopwatch sw;
        const auto env = envelope::decode(to_string(wire));
        session.timing.mPrUs += sw.elapsed_us();
        process_message(step, env, session, crypto);
        session.record(TranscriptEntry{step.direction, step.message, std::move(wire)});
      }
    } catch (const Error& e) {
      return finish(Failure{e.code(), i + 1, e.what()});
    } catch (const std::exception& e) {
      return finish(Failure{Errc::IoError, i + 1, e.what()});
    }
    rec.mConUs = session.timing.mConUs - mCon0;
    rec.mPrUs = session.timing.mPrUs - mPr0;
    session.record(std::move(rec));
  }

  return finish(std::nullopt);
}

LoadedSpecs load_specs(std::string_view seqDocument, std::string_view semDocument) {
  const Stopwatch sw;
  auto role = seqspec::parse_seqspec(seqDocument);
  auto spec = semspec::parse_semspec(semDocument);
  auto plan = plan::plan_role(role, spec);
  const auto elapsed = sw.elapsed_us();
  return LoadedSpecs{std::move(role), std::move(spec), std::move(plan), elapsed};
}

}  // namespace protoforge::exec
