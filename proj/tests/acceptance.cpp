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

// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "protoforge/harness.hpp"
#include "protoforge/rules.hpp"
#include "support.hpp"

namespace {

using namespace protoforge;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_s(double s) {
  std::ostringstream o;
  o.precision(3);
  o << std::fixed << s << " s";
  return o.str();
}

Verdict rule_fidelity() {
  pft::Rng rng(pft::base_seed());
  const auto t0 = Clock::now();
  int mismatches = 0;
  std::size_t diagnostics = 0;
  for (int i = 0; i < 500; ++i) {
    const auto spec = pft::random_spec(rng, 12, 20);
    std::vector<Diagnostic> got;
    for (auto* f : {rules::check_rule1, rules::check_rule2, rules::check_rule3}) {
      const auto ds = f(spec);
      got.insert(got.end(), ds.begin(), ds.end());
    }
    diagnostics += got.size();
    if (pft::findings(got) != pft::rule_oracle(spec.model())) ++mismatches;
  }
  const auto elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 10.0, std::to_string(mismatches) + " mismatches over 500 models (" +
                                                 std::to_string(diagnostics) + " diagnostics), " + fmt_s(elapsed)};
}

Verdict fixture_cleanliness() {
  std::size_t errors = 0;
  std::size_t roles = 0;
  for (const auto& proto : pft::shipped_protocols()) {
    for (const auto& e : harness::load_bundle(proto).roles) {
      ++roles;
      const auto role = seqspec::parse_seqspec(read_file(e.seqspec));
      const auto spec = semspec::parse_semspec(read_file(e.semspec));
      std::vector<Diagnostic> all = seqspec::validate_seqspec(role);
      for (auto&& ds : {seqspec::cross_check(role, spec), rules::check_all(spec, true)}) {
        all.insert(all.end(), ds.begin(), ds.end());
      }
      for (const auto& d : all) {
        if (d.severity == Severity::Error) {
          ++errors;
          std::cerr << "  " << e.semspec.filename().string() << ": " << format_line(d) << '\n';
        }
      }
    }
  }
  return {errors == 0, std::to_string(roles) + " roles, " + std::to_string(errors) + " errors"};
}

Verdict end_to_end(const std::string& proto, double limit, const std::string& agreeOn) {
  const auto t0 = Clock::now();
  const auto run = harness::run_inproc(harness::load_bundle(proto));
  const auto elapsed = seconds_since(t0);
  std::string detail = std::to_string(run.roles.size()) + " roles";
  bool ok = run.ok() && elapsed < limit;
  for (const auto& r : run.roles) {
    if (!r.outcome.ok()) detail += "; " + r.role + " failed: " + r.outcome.failure->message;
  }
  if (!agreeOn.empty()) {
    std::set<Bytes> values;
    for (const auto& r : run.roles) {
      const auto it = r.bindings.find(agreeOn);
      if (it == r.bindings.end()) {
        ok = false;
      } else {
        values.insert(it->second);
      }
    }
    ok = ok && values.size() == 1;
    detail += ", " + agreeOn + (values.size() == 1 ? " identical" : " differs");
  }
  return {ok, detail + ", " + fmt_s(elapsed)};
}

Verdict end_to_end_others() {
  const auto iso = end_to_end("iso9798", 2.0, "");
  const auto krb = end_to_end("kerberos", 2.0, "SessionKey");
  return {iso.pass && krb.pass, "iso9798: " + iso.detail + "; kerberos: " + krb.detail};
}

bool has_encrypt(const plan::TermPlan& tp) {
  for (const auto& a : tp.actions) {
    if (a.kind == plan::ActionKind::EncryptUnder) return true;
  }
  return false;
}

Verdict tamper_detection() {
  const auto roles = harness::load_roles(harness::load_bundle("ban"));
  harness::RunOptions base;
  base.seed = pft::base_seed();
  const auto clean = harness::run_inproc(roles, base);
  if (!clean.ok()) return {false, "clean run failed"};

  int injections = 0;
  int detected = 0;
  for (const auto& sender : roles) {
    const auto* rec = clean.find(sender.entry.role);
    for (const auto& step : sender.specs.plan.steps) {
      if (step.direction != seqspec::Direction::Output) continue;
      for (const auto& el : step.elements) {
        if (!has_encrypt(el.plan)) continue;
        std::size_t size = 0;
        for (const auto& t : rec->transcript) {
          if (t.message == step.message) size = envelope::decode(to_string(t.envelope)).find(el.element.name)->size();
        }
        for (std::size_t i = 0; i < size; ++i) {
          auto opts = base;
          opts.timeout = 2000ms;
          const auto message = step.message;
          const auto element = el.element.name;
          opts.wrap = [=](const std::string&, std::unique_ptr<transport::Transport> inner)
              -> std::unique_ptr<transport::Transport> {
            return std::make_unique<transport::InterceptingTransport>(std::move(inner), [=](std::string_view, Bytes& wire) {
              auto env = envelope::decode(to_string(wire));
              if (env.message != message) return;
              for (auto& [name, value] : env.elements) {
                if (name == element) value[i] ^= 0x01;
              }
              wire = to_bytes(envelope::encode(env));
            });
          };
          ++injections;
          if (!harness::run_inproc(roles, opts).ok()) ++detected;
        }
      }
    }
  }
  return {injections > 0 && detected == injections,
          std::to_string(detected) + "/" + std::to_string(injections) + " single-byte corruptions detected"};
}

// Parses "x.yz" into hundredths.
std::int64_t hundredths(const std::string& cell) {
  const auto s = cell.substr(cell.find_first_not_of(' '));
  const auto dot = s.find('.');
  return std::stoll(s.substr(0, dot)) * 100 + std::stoll(s.substr(dot + 1, 2));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(part);
  return out;
}

Verdict timing_shape() {
  std::vector<harness::ProtocolBundle> bundles;
  for (const auto& p : pft::shipped_protocols()) bundles.push_back(harness::load_bundle(p));
  const auto table = harness::bench(bundles, 5);
  if (!table.errors.empty()) return {false, table.errors.front()};
  const auto lines = split(table.render(), '\n');
  const auto header = split(lines.at(0), '|');
  const std::vector<std::string> want{"S-PR (ms)", "M-CON (ms)", "M-PR (ms)", "Total (ms)"};
  bool ok = header.size() == 5;
  for (std::size_t i = 0; ok && i < want.size(); ++i) ok = header[i + 1].find(want[i]) != std::string::npos;
  std::size_t rows = 0;
  std::int64_t worst = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto cells = split(lines[i], '|');
    if (cells.size() != 5) continue;
    ++rows;
    const std::int64_t drift = std::llabs(hundredths(cells[4]) - (hundredths(cells[1]) + hundredths(cells[2]) + hundredths(cells[3])));
    worst = std::max(worst, drift);
  }
  ok = ok && rows == table.rows.size() && rows > 0 && worst <= 2;
  return {ok, std::to_string(rows) + " rows, worst |Total - sum| = 0." + (worst < 10 ? "0" : "") + std::to_string(worst) +
                  " ms"};
}

Verdict qualitative_ordering() {
  const auto table = harness::bench({harness::load_bundle("ban"), harness::load_bundle("iso9798")}, 20);
  if (!table.errors.empty()) return {false, table.errors.front()};
  std::int64_t ban = -1, iso = -1;
  for (const auto& r : table.rows) {
    if (r.roleLabel == "BAN Init.") ban = r.totalUs();
    if (r.roleLabel == "ISO9798 Init.") iso = r.totalUs();
  }
  using exec::TimingReport;
  return {ban >= 0 && iso > ban, "median Total over 20 reps: ISO9798 Init. " + TimingReport::format_ms(iso) +
                                     " ms vs BAN Init. " + TimingReport::format_ms(ban) + " ms"};
}

Verdict round_trips() {
  int docs = 0;
  int bad = 0;
  for (const auto& proto : pft::shipped_protocols()) {
    for (const auto& e : harness::load_bundle(proto).roles) {
      const auto seq = seqspec::parse_seqspec(read_file(e.seqspec));
      const auto seqText = seqspec::serialize_seqspec(seq);
      const auto seq2 = seqspec::parse_seqspec(seqText);
      if (!(seq2 == seq) || seqspec::serialize_seqspec(seq2) != seqText) ++bad;
      const auto sem = semspec::parse_semspec(read_file(e.semspec));
      const auto semText = semspec::serialize_semspec(sem);
      const auto sem2 = semspec::parse_semspec(semText);
      if (!semspec::structurally_equal(sem, sem2) || semspec::serialize_semspec(sem2) != semText) ++bad;
      docs += 2;
    }
  }
  return {bad == 0, std::to_string(docs) + " documents, " + std::to_string(bad) + " failures"};
}

using CryptoKey = std::pair<std::string, std::string>;

void collect(const plan::TermPlan& tp, plan::ActionKind kind, std::multiset<CryptoKey>& out) {
  for (const auto& a : tp.actions) {
    if (a.kind == kind) out.emplace(a.algorithm, a.key.concept_name);
    for (const auto& p : a.payload) collect(p, kind, out);
  }
}

Verdict duality() {
  // Signatures are held to the same pairing as encryption.
  const std::pair<plan::ActionKind, plan::ActionKind> kinds[] = {
      {plan::ActionKind::EncryptUnder, plan::ActionKind::DecryptUnder},
      {plan::ActionKind::SignUnder, plan::ActionKind::VerifySignature}};
  int counts[2] = {0, 0};
  int unmatched = 0;
  for (const auto* proto : {"ban", "iso9798"}) {
    const auto roles = harness::load_roles(harness::load_bundle(proto));
    for (std::size_t s = 0; s < roles.size(); ++s) {
      const auto& peer = roles[1 - s].specs.plan;
      for (const auto& step : roles[s].specs.plan.steps) {
        if (step.direction != seqspec::Direction::Output) continue;
        for (int k = 0; k < 2; ++k) {
          std::multiset<CryptoKey> out, in;
          for (const auto& e : step.elements) collect(e.plan, kinds[k].first, out);
          for (const auto& ps : peer.steps) {
            if (ps.message != step.message || ps.direction != seqspec::Direction::Input) continue;
            for (const auto& e : ps.elements) collect(e.plan, kinds[k].second, in);
          }
          for (const auto& key : out) {
            ++counts[k];
            const auto it = in.find(key);
            if (it == in.end()) {
              ++unmatched;
            } else {
              in.erase(it);
            }
          }
        }
      }
    }
  }
  return {unmatched == 0 && counts[0] > 0, std::to_string(counts[0]) + " EncryptUnder and " + std::to_string(counts[1]) +
                                               " SignUnder actions, " + std::to_string(unmatched) + " unmatched in the peer"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"rule fidelity against brute-force oracle", rule_fidelity},
      {"shipped fixtures validate cleanly", fixture_cleanliness},
      {"BAN end to end with agreed session key", [] { return end_to_end("ban", 1.0, "SessionKey"); }},
      {"ISO9798 and Kerberos end to end", end_to_end_others},
      {"tamper detection on every ciphertext byte", tamper_detection},
      {"timing report shape and additivity", timing_shape},
      {"public-key protocol slower than symmetric one", qualitative_ordering},
      {"document round-trips", round_trips},
      {"planner duality", duality},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " -- "
              << v.detail << std::endl;
  }
  return failed;
}
