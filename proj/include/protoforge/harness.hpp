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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protoforge/executor.hpp"

/// Protocol bundles on disk, multi-role runs and the timing bench.
namespace protoforge::harness {

/// One role of a bundle. Paths are absolute.
struct RoleEntry {
  std::string role;
  std::string label;  // bench row label, e.g. "BAN Init."
  std::filesystem::path seqspec;
  std::filesystem::path semspec;
  std::filesystem::path keystore;
};

/// A protocol directory holding bundle.json plus the files it lists.
struct ProtocolBundle {
  std::string name;
  std::string title;
  std::filesystem::path dir;
  std::vector<RoleEntry> roles;

  [[nodiscard]] const RoleEntry* find(std::string_view role) const;
};

/// $PROTOFORGE_PROTOCOL_DIR if set, else the source tree's protocols/.
std::filesystem::path default_protocol_dir();

/// `nameOrPath` is a directory containing bundle.json or the name of a
/// subdirectory of `protocolDir`. Throws Error(IoError) or
/// Error(SyntaxError).
ProtocolBundle load_bundle(const std::filesystem::path& nameOrPath,
                           const std::filesystem::path& protocolDir = default_protocol_dir());

/// Names of every bundle under the directory, sorted.
std::vector<std::string> available_bundles(const std::filesystem::path& protocolDir = default_protocol_dir());

struct LoadedRole {
  RoleEntry entry;
  exec::LoadedSpecs specs;
  crypto::Keystore keystore;
};

/// Reads and plans one role; S-PR covers parsing, checking and planning.
LoadedRole load_role(const RoleEntry& entry);
std::vector<LoadedRole> load_roles(const ProtocolBundle& bundle);

/// Message name -> the other role exchanging it with `self`.
std::map<std::string, std::string, std::less<>> routes(const std::vector<LoadedRole>& roles, std::string_view self);

/// The role whose first operation receives (it listens on stream
/// transports).
bool starts_with_input(const plan::RolePlan& plan);

using TransportWrapper =
    std::function<std::unique_ptr<transport::Transport>(const std::string& role, std::unique_ptr<transport::Transport>)>;

struct RunOptions {
  /// Per-role DeterministicProvider seeded from this value; the shared
  /// OpenSSL provider otherwise.
  std::optional<std::uint64_t> seed;
  std::chrono::milliseconds timeout{5000};
  TransportWrapper wrap;
};

struct RoleResult {
  std::string role;
  std::string label;
  exec::Outcome outcome;
  std::map<std::string, Bytes, std::less<>> bindings;
  std::vector<exec::TranscriptEntry> transcript;
  std::vector<exec::StepRecord> steps;
};

struct RunResult {
  std::vector<RoleResult> roles;

  [[nodiscard]] bool ok() const;
  [[nodiscard]] const RoleResult* find(std::string_view role) const;
};

/// Runs every role concurrently over one in-process network. The first
/// failing role shuts the network down so its peers stop waiting.
RunResult run_inproc(const std::vector<LoadedRole>& roles, const RunOptions& options = {});
RunResult run_inproc(const ProtocolBundle& bundle, const RunOptions& options = {});

/// Two-role run over loopback TCP; the role that starts with an input
/// listens on an ephemeral port.
RunResult run_tcp_pair(const std::vector<LoadedRole>& roles, const RunOptions& options = {});

/// Runs a single role against a remote peer. Listens on `endpoint` when
/// the role starts with an input, connects otherwise.
RoleResult run_tcp_role(const LoadedRole& role, const std::vector<LoadedRole>& peers,
                        const transport::Endpoint& endpoint, const RunOptions& options = {});

/// One row per (exchange, role). Protocols with several role pairs number
/// their exchanges ("Kerb. Init. 1"); a role's S-PR counts toward the
/// first exchange it takes part in.
std::vector<exec::TimingReport> exchange_rows(const std::vector<LoadedRole>& roles, const RunResult& run);

struct BenchTable {
  std::vector<exec::TimingReport> rows;
  std::vector<std::string> errors;

  [[nodiscard]] std::string render() const;
  [[nodiscard]] std::string render_tsv() const;
};

/// Each row is the per-column median over `reps` runs; Total is the sum of
/// the medians. A protocol whose run fails contributes an error instead
/// of rows.
BenchTable bench(const std::vector<ProtocolBundle>& bundles, unsigned reps, const RunOptions& options = {});

}  // namespace protoforge::harness
