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

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protoforge/bytes.hpp"
#include "protoforge/crypto.hpp"
#include "protoforge/envelope.hpp"
#include "protoforge/planner.hpp"
#include "protoforge/transport.hpp"

namespace protoforge::exec {

using seqspec::Direction;

/// Phase durations in microseconds, rendered as milliseconds with two
/// decimals.
struct TimingReport {
  std::string roleLabel;
  std::int64_t sPrUs = 0;
  std::int64_t mConUs = 0;
  std::int64_t mPrUs = 0;

  [[nodiscard]] std::int64_t totalUs() const noexcept { return sPrUs + mConUs + mPrUs; }

  /// "12.34"
  static std::string format_ms(std::int64_t us);
};

struct TranscriptEntry {
  Direction direction = Direction::Output;
  std::string message;
  Bytes envelope;

  bool operator==(const TranscriptEntry&) const = default;
};

struct StepRecord {
  Direction direction = Direction::Output;
  std::string message;
  std::string peer;
  std::int64_t mConUs = 0;
  std::int64_t mPrUs = 0;
};

/// State of one running role. Confined to a single thread.
class Session {
 public:
  explicit Session(crypto::Keystore keystore = {}) : keystore_(std::move(keystore)) {}

  [[nodiscard]] const Bytes* binding(std::string_view concept_name) const;
  /// Binds once; a second bind with different bytes throws
  /// Error(VerificationMismatch).
  void bind(const std::string& concept_name, Bytes value);
  [[nodiscard]] const std::map<std::string, Bytes, std::less<>>& bindings() const noexcept { return bindings_; }

  [[nodiscard]] const crypto::Keystore& keystore() const noexcept { return keystore_; }
  crypto::Keystore& keystore() noexcept { return keystore_; }

  [[nodiscard]] const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }
  void record(TranscriptEntry entry) { transcript_.push_back(std::move(entry)); }

  [[nodiscard]] const std::vector<StepRecord>& steps() const noexcept { return steps_; }
  void record(StepRecord step) { steps_.push_back(std::move(step)); }

  TimingReport timing;

 private:
  std::map<std::string, Bytes, std::less<>> bindings_;
  crypto::Keystore keystore_;
  std::vector<TranscriptEntry> transcript_;
  std::vector<StepRecord> steps_;
};

struct Failure {
  Errc code = Errc::IoError;
  std::size_t step = 0;  // 1-based; 0 before the first step
  std::string message;
};

struct EffectResult {
  std::string name;
  std::string concept_name;
  bool satisfied = false;
};

struct Outcome {
  std::optional<Failure> failure;
  std::vector<EffectResult> effects;
  TimingReport timing;

  [[nodiscard]] bool ok() const noexcept { return !failure.has_value(); }
};

/// True when the value can be produced from the session: bound, a literal
/// instance, or an item present in the keystore.
bool satisfiable(const plan::ValueSource& source, const Session& session);

/// One diagnostic per precondition whose concept is neither bound nor
/// loadable from the keystore.
std::vector<Diagnostic> check_preconditions(const seqspec::RoleSpec& role, const semspec::SemSpec& spec,
                                            const Session& session);
std::vector<Diagnostic> check_preconditions(const plan::RolePlan& plan, const Session& session);

/// Runs the Output step's term plans; adds the elapsed time to mCon.
envelope::Envelope construct_message(const plan::MessageStep& step, Session& session, crypto::CryptoProvider& crypto);
/// Runs the Input step's term plans against a received envelope; adds the
/// elapsed time to mPr.
void process_message(const plan::MessageStep& step, const envelope::Envelope& env, Session& session,
                     crypto::CryptoProvider& crypto);

struct ExecutionOptions {
  /// Message name -> peer the message is exchanged with.
  std::map<std::string, std::string, std::less<>> peers;
  std::chrono::milliseconds timeout{5000};
};

/// Never throws for protocol failures; they come back in Outcome.failure.
Outcome execute_role(const plan::RolePlan& plan, Session& session, transport::Transport& transport,
                     crypto::CryptoProvider& crypto, const ExecutionOptions& options);

struct LoadedSpecs {
  seqspec::RoleSpec role;
  semspec::SemSpec spec;
  plan::RolePlan plan;
  std::int64_t sPrUs = 0;
};

/// Parse, validate, cross-check, rule-check and plan. Throws the failing
/// stage's error (SyntaxError, SpecRejected, ...).
LoadedSpecs load_specs(std::string_view seqDocument, std::string_view semDocument);

}  // namespace protoforge::exec
