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

// protoforge: validate, plan, run and benchmark protocol specifications.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "protoforge/harness.hpp"
#include "protoforge/rules.hpp"
#include "protoforge/xml.hpp"

namespace fs = std::filesystem;
using namespace protoforge;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kIoError = 2, kTimeout = 3 };

struct Globals {
  std::string specDir;
  bool includeExtrapolated = false;
};

fs::path protocol_dir(const Globals& g) { return g.specDir.empty() ? harness::default_protocol_dir() : fs::path(g.specDir); }

bool is_bundle(const std::string& arg, const Globals& g) {
  return fs::exists(fs::path(arg) / "bundle.json") || (!arg.empty() && fs::exists(protocol_dir(g) / arg / "bundle.json"));
}

void print(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) std::cout << format_line(d) << '\n';
}

// ---- validate

struct Document {
  fs::path path;
  std::optional<seqspec::RoleSpec> seq;
  std::optional<semspec::SemSpec> sem;
};

Document load_document(const fs::path& path) {
  const auto text = read_file(path);
  const auto root = xml::parse(text);
  Document d{path, {}, {}};
  if (root.ns == semspec::kDocumentNamespace) {
    d.sem = semspec::parse_semspec(text);
  } else {
    d.seq = seqspec::parse_seqspec(text);
  }
  return d;
}

std::vector<Diagnostic> check_pair(const seqspec::RoleSpec* seq, const semspec::SemSpec* sem, bool extrapolated) {
  std::vector<Diagnostic> out;
  if (seq != nullptr) {
    auto v = seqspec::validate_seqspec(*seq);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (sem != nullptr) {
    auto v = rules::check_all(*sem, extrapolated);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (seq != nullptr && sem != nullptr) {
    auto v = seqspec::cross_check(*seq, *sem);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

int cmd_validate(const std::vector<std::string>& args, const Globals& g) {
  std::vector<Diagnostic> all;
  std::vector<Document> docs;
  try {
    for (const auto& a : args) {
      if (is_bundle(a, g) && !fs::is_regular_file(a)) {
        const auto bundle = harness::load_bundle(a, protocol_dir(g));
        for (const auto& r : bundle.roles) {
          const auto seq = load_document(r.seqspec);
          const auto sem = load_document(r.semspec);
          auto ds = check_pair(&*seq.seq, &*sem.sem, g.includeExtrapolated);
          all.insert(all.end(), ds.begin(), ds.end());
        }
        continue;
      }
      if (!fs::is_regular_file(a)) throw Error(Errc::IoError, "cannot open " + a);
      docs.push_back(load_document(a));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }

  std::vector<const Document*> seqs;
  std::vector<const Document*> sems;
  for (const auto& d : docs) (d.seq ? seqs : sems).push_back(&d);
  if (!seqs.empty() && seqs.size() == sems.size()) {
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      auto ds = check_pair(&*seqs[i]->seq, &*sems[i]->sem, g.includeExtrapolated);
      all.insert(all.end(), ds.begin(), ds.end());
    }
  } else {
    for (const auto& d : docs) {
      auto ds = check_pair(d.seq ? &*d.seq : nullptr, d.sem ? &*d.sem : nullptr, g.includeExtrapolated);
      all.insert(all.end(), ds.begin(), ds.end());
    }
  }
  print(all);
  return has_errors(all) ? kFailure : kOk;
}

// ---- plan

int cmd_plan(const std::vector<std::string>& args, const Globals& g) {
  if (args.size() != 2) {
    std::cerr << "error: plan takes <protocol> <role> or <seqspec> <semspec>\n";
    return kIoError;
  }
  try {
    exec::LoadedSpecs specs = [&] {
      if (is_bundle(args[0], g)) {
        const auto bundle = harness::load_bundle(args[0], protocol_dir(g));
        const auto* r = bundle.find(args[1]);
        if (r == nullptr) throw Error(Errc::IoError, "bundle " + bundle.name + " has no role '" + args[1] + "'");
        return exec::load_specs(read_file(r->seqspec), read_file(r->semspec));
      }
      return exec::load_specs(read_file(args[0]), read_file(args[1]));
    }();
    std::cout << plan::dump(specs.plan);
    return kOk;
  } catch (const plan::SpecRejected& e) {
    print(e.diagnostics());
    return kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::IoError || e.code() == Errc::SyntaxError ? kIoError : kFailure;
  }
}

// ---- run

struct RunArgs {
  std::string protocol;
  std::string role;
  std::string transport = "inproc";
  std::string keystore;
  bool reveal = false;
  std::optional<std::uint64_t> seed;
  int timeoutMs = 5000;
};

void report(const harness::RoleResult& r, bool reveal) {
  std::cout << "role " << r.role << " (" << r.label << "): ";
  if (r.outcome.ok()) {
    std::cout << "ok\n";
  } else {
    const auto& f = *r.outcome.failure;
    std::cout << "failed at step " << f.step << ": " << f.message << '\n';
  }
  for (const auto& e : r.outcome.effects) {
    std::cout << "  effect " << e.name << " -> " << e.concept_name << ": " << (e.satisfied ? "satisfied" : "not satisfied");
    if (e.satisfied) {
      const auto it = r.bindings.find(e.concept_name);
      std::cout << (reveal && it != r.bindings.end() ? " = " + hex_encode(it->second) : std::string(" (value redacted)"));
    }
    std::cout << '\n';
  }
  const auto& t = r.outcome.timing;
  using exec::TimingReport;
  std::cout << "  timing S-PR " << TimingReport::format_ms(t.sPrUs) << " ms, M-CON " << TimingReport::format_ms(t.mConUs)
            << " ms, M-PR " << TimingReport::format_ms(t.mPrUs) << " ms, Total "
            << TimingReport::format_ms(t.totalUs()) << " ms\n";
}

int exit_for(const harness::RoleResult& r) {
  if (r.outcome.ok()) return kOk;
  return r.outcome.failure->code == Errc::Timeout ? kTimeout : kFailure;
}

int cmd_run(const RunArgs& a, const Globals& g) {
  try {
    const auto bundle = harness::load_bundle(a.protocol, protocol_dir(g));
    if (bundle.find(a.role) == nullptr) throw Error(Errc::IoError, "bundle " + bundle.name + " has no role '" + a.role + "'");
    auto roles = harness::load_roles(bundle);
    for (auto& r : roles) {
      if (r.entry.role == a.role && !a.keystore.empty()) r.keystore = crypto::Keystore::load(a.keystore);
    }
    harness::RunOptions options;
    options.seed = a.seed;
    options.timeout = std::chrono::milliseconds(a.timeoutMs);

    if (a.transport == "inproc") {
      const auto run = harness::run_inproc(roles, options);
      int code = kOk;
      for (const auto& r : run.roles) {
        report(r, a.reveal);
        if (code == kOk) code = exit_for(r);
      }
      if (const auto* mine = run.find(a.role); mine != nullptr && !mine->outcome.ok()) code = exit_for(*mine);
      return code;
    }
    if (a.transport.rfind("tcp:", 0) != 0) {
      throw Error(Errc::InvalidEndpoint, "transport must be inproc or tcp:<host>:<port>");
    }
    const auto endpoint = transport::parse_endpoint(a.transport.substr(4));
    const harness::LoadedRole* me = nullptr;
    for (const auto& r : roles) {
      if (r.entry.role == a.role) me = &r;
    }
    const auto result = harness::run_tcp_role(*me, roles, endpoint, options);
    report(result, a.reveal);
    return exit_for(result);
  } catch (const plan::SpecRejected& e) {
    print(e.diagnostics());
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::Timeout ? kTimeout : kIoError;
  }
}

// ---- bench

int cmd_bench(const std::vector<std::string>& protocols, unsigned reps, const std::string& format,
              std::optional<std::uint64_t> seed, const Globals& g) {
  try {
    std::vector<harness::ProtocolBundle> bundles;
    for (const auto& p : protocols) bundles.push_back(harness::load_bundle(p, protocol_dir(g)));
    harness::RunOptions options;
    options.seed = seed;
    const auto table = harness::bench(bundles, reps, options);
    std::cout << (format == "tsv" ? table.render_tsv() : table.render());
    for (const auto& e : table.errors) std::cerr << "error: " << e << '\n';
    return table.errors.empty() ? kOk : kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}

// ---- explain

int cmd_explain(const std::string& id) {
  const auto registry = rules::RuleRegistry::standard();
  const auto* r = registry.find(id);
  if (r == nullptr) {
    std::cerr << "error: unknown rule '" << id << "'; known rules:";
    for (const auto& rule : registry.rules()) std::cerr << ' ' << rule.descriptor.id;
    std::cerr << '\n';
    return kIoError;
  }
  std::cout << r->descriptor.id << " [" << to_string(r->descriptor.category) << ", "
            << to_string(r->descriptor.origin) << "]\n"
            << r->descriptor.summary << "\n\n"
            << r->explanation << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validate, plan, run and benchmark security protocol specifications"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--spec-dir", g.specDir, "Directory holding protocol bundles");

  std::vector<std::string> validateArgs;
  auto* validate = app.add_subcommand("validate", "Check SEQ-S/SEM-S documents or whole bundles");
  validate->add_option("paths", validateArgs, "Document paths or bundle names")->required();
  validate->add_flag("--include-extrapolated", g.includeExtrapolated, "Also run the extrapolated rules");

  std::vector<std::string> planArgs;
  auto* planCmd = app.add_subcommand("plan", "Print the execution plan of a role");
  planCmd->add_option("args", planArgs, "<protocol> <role> or <seqspec> <semspec>")->required();

  RunArgs runArgs;
  auto* run = app.add_subcommand("run", "Execute a protocol role");
  run->add_option("protocol", runArgs.protocol)->required();
  run->add_option("role", runArgs.role)->required();
  run->add_option("--transport", runArgs.transport, "inproc or tcp:<host>:<port>");
  run->add_option("--keystore", runArgs.keystore, "Keystore for the selected role");
  run->add_flag("--reveal", runArgs.reveal, "Print effect values");
  run->add_option("--seed", runArgs.seed, "Deterministic crypto seed");
  run->add_option("--timeout-ms", runArgs.timeoutMs, "Receive and connect deadline")->check(CLI::PositiveNumber);

  std::vector<std::string> benchArgs;
  unsigned reps = 20;
  std::string format = "table";
  std::optional<std::uint64_t> benchSeed;
  auto* benchCmd = app.add_subcommand("bench", "Time protocol runs");
  benchCmd->add_option("protocols", benchArgs)->required();
  benchCmd->add_option("--reps", reps, "Repetitions per protocol")->check(CLI::PositiveNumber);
  benchCmd->add_option("--format", format)->check(CLI::IsMember({"table", "tsv"}));
  benchCmd->add_option("--seed", benchSeed, "Deterministic crypto seed");

  std::string ruleId;
  auto* explain = app.add_subcommand("explain", "Describe a rule");
  explain->add_option("rule-id", ruleId)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kIoError;
  }

  if (*validate) return cmd_validate(validateArgs, g);
  if (*planCmd) return cmd_plan(planArgs, g);
  if (*run) return cmd_run(runArgs, g);
  if (*benchCmd) return cmd_bench(benchArgs, reps, format, benchSeed, g);
  if (*explain) return cmd_explain(ruleId);
  return kIoError;
}
