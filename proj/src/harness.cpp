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

#include "protoforge/harness.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "protoforge/error.hpp"

#ifndef PROTOFORGE_PROTOCOL_DIR
#define PROTOFORGE_PROTOCOL_DIR "protocols"
#endif

namespace protoforge::harness {

namespace fs = std::filesystem;

namespace {

std::string string_field(const nlohmann::json& j, const char* key, const fs::path& file) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(Errc::SyntaxError, file.string() + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::uint64_t role_seed(std::uint64_t seed, std::size_t index) {
  return seed ^ (0x9E3779B97F4A7C15ull * (index + 1));
}

RoleResult run_session(const LoadedRole& r, const std::vector<LoadedRole>& all, std::size_t index,
                       transport::Transport& t, crypto::CryptoProvider& shared, const RunOptions& options) {
  std::unique_ptr<crypto::CryptoProvider> own;
  auto* cp = &shared;
  if (options.seed) {
    own = std::make_unique<crypto::DeterministicProvider>(role_seed(*options.seed, index));
    cp = own.get();
  }
  exec::Session session(r.keystore);
  session.timing.roleLabel = r.entry.label;
  session.timing.sPrUs = r.specs.sPrUs;
  const exec::ExecutionOptions eo{routes(all, r.entry.role), options.timeout};
  auto outcome = exec::execute_role(r.specs.plan, session, t, *cp, eo);
  return RoleResult{r.entry.role, r.entry.label, std::move(outcome), session.bindings(), session.transcript(),
                    session.steps()};
}

RoleResult failed(const LoadedRole& r, const Error& e) {
  RoleResult out{r.entry.role, r.entry.label, {}, {}, {}, {}};
  out.outcome.failure = exec::Failure{e.code(), 1, e.what()};
  out.outcome.timing.roleLabel = r.entry.label;
  out.outcome.timing.sPrUs = r.specs.sPrUs;
  return out;
}

std::unique_ptr<transport::Transport> wrapped(const RunOptions& options, const std::string& role,
                                              std::unique_ptr<transport::Transport> t) {
  return options.wrap ? options.wrap(role, std::move(t)) : std::move(t);
}

std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

const RoleEntry* ProtocolBundle::find(std::string_view role) const {
  for (const auto& r : roles) {
    if (r.role == role) return &r;
  }
  return nullptr;
}

fs::path default_protocol_dir() {
  if (const char* env = std::getenv("PROTOFORGE_PROTOCOL_DIR"); env != nullptr && *env != '\0') return env;
  return PROTOFORGE_PROTOCOL_DIR;
}

ProtocolBundle load_bundle(const fs::path& nameOrPath, const fs::path& protocolDir) {
  auto dir = nameOrPath;
  if (!fs::exists(dir / "bundle.json")) dir = protocolDir / nameOrPath;
  const auto manifest = dir / "bundle.json";
  if (!fs::exists(manifest)) throw Error(Errc::IoError, "no protocol bundle '" + nameOrPath.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SyntaxError, manifest.string() + ": " + e.what());
  }
  ProtocolBundle b;
  b.dir = fs::absolute(dir);
  b.name = string_field(j, "name", manifest);
  b.title = j.value("title", b.name);
  if (!j.contains("roles") || !j.at("roles").is_array() || j.at("roles").empty()) {
    throw Error(Errc::SyntaxError, manifest.string() + ": 'roles' must be a non-empty array");
  }
  for (const auto& r : j.at("roles")) {
    RoleEntry e;
    e.role = string_field(r, "role", manifest);
    e.label = r.value("label", e.role);
    e.seqspec = b.dir / string_field(r, "seqspec", manifest);
    e.semspec = b.dir / string_field(r, "semspec", manifest);
    e.keystore = b.dir / string_field(r, "keystore", manifest);
    if (b.find(e.role) != nullptr) throw Error(Errc::SyntaxError, manifest.string() + ": duplicate role " + e.role);
    b.roles.push_back(std::move(e));
  }
  return b;
}

std::vector<std::string> available_bundles(const fs::path& protocolDir) {
  std::vector<std::string> out;
  if (!fs::is_directory(protocolDir)) return out;
  for (const auto& entry : fs::directory_iterator(protocolDir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "bundle.json")) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

LoadedRole load_role(const RoleEntry& entry) {
  const auto seq = read_file(entry.seqspec);
  const auto sem = read_file(entry.semspec);
  auto specs = exec::load_specs(seq, sem);
  auto keystore = crypto::Keystore::load(entry.keystore);
  return LoadedRole{entry, std::move(specs), std::move(keystore)};
}

std::vector<LoadedRole> load_roles(const ProtocolBundle& bundle) {
  std::vector<LoadedRole> out;
  for (const auto& r : bundle.roles) out.push_back(load_role(r));
  return out;
}

std::map<std::string, std::string, std::less<>> routes(const std::vector<LoadedRole>& roles, std::string_view self) {
  std::map<std::string, std::string, std::less<>> out;
  const LoadedRole* me = nullptr;
  for (const auto& r : roles) {
    if (r.entry.role == self) me = &r;
  }
  if (me == nullptr) return out;
  for (const auto& step : me->specs.plan.steps) {
    for (const auto& other : roles) {
      if (&other == me) continue;
      const auto& steps = other.specs.plan.steps;
      const bool dual = std::any_of(steps.begin(), steps.end(), [&](const plan::MessageStep& s) {
        return s.message == step.message && s.direction != step.direction;
      });
      if (dual) {
        out.emplace(step.message, other.entry.role);
        break;
      }
    }
  }
  return out;
}

bool starts_with_input(const plan::RolePlan& plan) {
  return !plan.steps.empty() && plan.steps.front().direction == seqspec::Direction::Input;
}

bool RunResult::ok() const {
  return !roles.empty() && std::all_of(roles.begin(), roles.end(), [](const RoleResult& r) { return r.outcome.ok(); });
}

const RoleResult* RunResult::find(std::string_view role) const {
  for (const auto& r : roles) {
    if (r.role == role) return &r;
  }
  return nullptr;
}

RunResult run_inproc(const std::vector<LoadedRole>& roles, const RunOptions& options) {
  transport::InProcNetwork net;
  crypto::OpenSslProvider shared;
  RunResult result;
  result.roles.resize(roles.size());
  std::vector<std::thread> threads;
  threads.reserve(roles.size());
  for (std::size_t i = 0; i < roles.size(); ++i) {
    threads.emplace_back([&, i] {
      auto t = wrapped(options, roles[i].entry.role, net.endpoint(roles[i].entry.role));
      result.roles[i] = run_session(roles[i], roles, i, *t, shared, options);
      if (!result.roles[i].outcome.ok()) net.shutdown();
    });
  }
  for (auto& t : threads) t.join();
  return result;
}

RunResult run_inproc(const ProtocolBundle& bundle, const RunOptions& options) {
  return run_inproc(load_roles(bundle), options);
}

RunResult run_tcp_pair(const std::vector<LoadedRole>& roles, const RunOptions& options) {
  if (roles.size() != 2) throw Error(Errc::InvalidEndpoint, "TCP runs need exactly two roles");
  const std::size_t listenerIdx = starts_with_input(roles[0].specs.plan) ? 0 : 1;
  const std::size_t connectorIdx = 1 - listenerIdx;
  transport::TcpListener listener({"127.0.0.1", 0});
  const transport::Endpoint target{"127.0.0.1", listener.port()};
  crypto::OpenSslProvider shared;
  RunResult result;
  result.roles.resize(2);
  const auto deadline = transport::Clock::now() + options.timeout;

  std::thread server([&] {
    const auto& r = roles[listenerIdx];
    try {
      auto t = wrapped(options, r.entry.role, listener.accept(deadline));
      result.roles[listenerIdx] = run_session(r, roles, listenerIdx, *t, shared, options);
    } catch (const Error& e) {
      result.roles[listenerIdx] = failed(r, e);
    }
  });
  {
    const auto& r = roles[connectorIdx];
    try {
      auto t = wrapped(options, r.entry.role, transport::tcp_connect(target, deadline));
      result.roles[connectorIdx] = run_session(r, roles, connectorIdx, *t, shared, options);
    } catch (const Error& e) {
      result.roles[connectorIdx] = failed(r, e);
    }
  }
  server.join();
  return result;
}

RoleResult run_tcp_role(const LoadedRole& role, const std::vector<LoadedRole>& peers,
                        const transport::Endpoint& endpoint, const RunOptions& options) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < peers.size(); ++i) {
    if (peers[i].entry.role == role.entry.role) index = i;
  }
  crypto::OpenSslProvider shared;
  const auto deadline = transport::Clock::now() + options.timeout;
  try {
    std::unique_ptr<transport::Transport> t;
    if (starts_with_input(role.specs.plan)) {
      transport::TcpListener listener(endpoint);
      t = listener.accept(deadline);
    } else {
      t = transport::tcp_connect(endpoint, deadline);
    }
    t = wrapped(options, role.entry.role, std::move(t));
    return run_session(role, peers, index, *t, shared, options);
  } catch (const Error& e) {
    return failed(role, e);
  }
}

std::vector<exec::TimingReport> exchange_rows(const std::vector<LoadedRole>& roles, const RunResult& run) {
  using Pair = std::pair<std::string, std::string>;
  const auto key = [](std::string a, std::string b) { return a < b ? Pair{a, b} : Pair{b, a}; };

  std::vector<Pair> exchanges;
  for (const auto& r : roles) {
    const auto rt = routes(roles, r.entry.role);
    for (const auto& s : r.specs.plan.steps) {
      const auto peer = rt.find(s.message);
      if (peer == rt.end()) continue;
      const auto k = key(r.entry.role, peer->second);
      if (std::find(exchanges.begin(), exchanges.end(), k) == exchanges.end()) exchanges.push_back(k);
    }
  }

  std::vector<exec::TimingReport> rows;
  for (std::size_t x = 0; x < exchanges.size(); ++x) {
    for (const auto& r : roles) {
      const auto& role = r.entry.role;
      if (exchanges[x].first != role && exchanges[x].second != role) continue;
      const auto* res = run.find(role);
      if (res == nullptr) continue;
      exec::TimingReport row;
      row.roleLabel = exchanges.size() > 1 ? r.entry.label + " " + std::to_string(x + 1) : r.entry.label;
      std::optional<std::size_t> first;
      for (const auto& s : res->steps) {
        const auto k = key(role, s.peer);
        const auto idx = static_cast<std::size_t>(std::find(exchanges.begin(), exchanges.end(), k) - exchanges.begin());
        if (!first) first = idx;
        if (idx != x) continue;
        row.mConUs += s.mConUs;
        row.mPrUs += s.mPrUs;
      }
      if (first == x) row.sPrUs = res->outcome.timing.sPrUs;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string BenchTable::render() const {
  const std::string head = "Protocol participant";
  std::size_t width = head.size();
  for (const auto& r : rows) width = std::max(width, r.roleLabel.size());
  std::ostringstream out;
  const auto cell = [&](const std::string& s, std::size_t w, bool right) {
    const auto padding = std::string(w > s.size() ? w - s.size() : 0, ' ');
    out << (right ? padding + s : s + padding);
  };
  const std::array<std::string, 4> cols{"S-PR (ms)", "M-CON (ms)", "M-PR (ms)", "Total (ms)"};
  cell(head, width, false);
  for (const auto& c : cols) {
    out << " | ";
    cell(c, 10, true);
  }
  out << '\n' << std::string(width, '-');
  for (std::size_t i = 0; i < cols.size(); ++i) out << "-+-" << std::string(10, '-');
  out << '\n';
  for (const auto& r : rows) {
    cell(r.roleLabel, width, false);
    for (const auto v : {r.sPrUs, r.mConUs, r.mPrUs, r.totalUs()}) {
      out << " | ";
      cell(exec::TimingReport::format_ms(v), 10, true);
    }
    out << '\n';
  }
  for (const auto& e : errors) out << "error: " << e << '\n';
  return out.str();
}

std::string BenchTable::render_tsv() const {
  std::ostringstream out;
  out << "participant\tS-PR\tM-CON\tM-PR\tTotal\n";
  for (const auto& r : rows) {
    out << r.roleLabel << '\t' << exec::TimingReport::format_ms(r.sPrUs) << '\t'
        << exec::TimingReport::format_ms(r.mConUs) << '\t' << exec::TimingReport::format_ms(r.mPrUs) << '\t'
        << exec::TimingReport::format_ms(r.totalUs()) << '\n';
  }
  return out.str();
}

BenchTable bench(const std::vector<ProtocolBundle>& bundles, unsigned reps, const RunOptions& options) {
  if (reps == 0) throw Error(Errc::IoError, "repetitions must be at least 1");
  BenchTable table;
  for (const auto& bundle : bundles) {
    std::vector<std::string> labels;
    std::map<std::string, std::array<std::vector<std::int64_t>, 3>> samples;
    std::optional<std::string> error;
    for (unsigned i = 0; i < reps && !error; ++i) {
      try {
        const auto roles = load_roles(bundle);
        const auto run = run_inproc(roles, options);
        if (!run.ok()) {
          for (const auto& r : run.roles) {
            if (!r.outcome.ok() && !error) {
              error = bundle.name + " " + r.role + ": step " + std::to_string(r.outcome.failure->step) + ": " +
                      r.outcome.failure->message;
            }
          }
          break;
        }
        for (const auto& row : exchange_rows(roles, run)) {
          if (i == 0) labels.push_back(row.roleLabel);
          auto& s = samples[row.roleLabel];
          s[0].push_back(row.sPrUs);
          s[1].push_back(row.mConUs);
          s[2].push_back(row.mPrUs);
        }
      } catch (const Error& e) {
        error = bundle.name + ": " + e.what();
      }
    }
    if (error) {
      table.errors.push_back(*error);
      continue;
    }
    for (const auto& label : labels) {
      const auto& s = samples.at(label);
      exec::TimingReport row;
      row.roleLabel = label;
      row.sPrUs = median(s[0]);
      row.mConUs = median(s[1]);
      row.mPrUs = median(s[2]);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace protoforge::harness
