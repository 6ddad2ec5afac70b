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

// Shared helpers for the test binaries: fixture access, a seeded RNG and
// the brute-force rule oracles.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "protoforge/bytes.hpp"
#include "protoforge/harness.hpp"
#include "protoforge/ontology.hpp"
#include "protoforge/semspec.hpp"

namespace pft {

using namespace protoforge;

inline std::filesystem::path protocols() { return PROTOFORGE_PROTOCOL_DIR; }

inline std::string fixture(const std::string& protocol, const std::string& file) {
  return read_file(protocols() / protocol / file);
}

inline const std::vector<std::string>& shipped_protocols() {
  static const std::vector<std::string> names{"ban", "iso9798", "kerberos"};
  return names;
}

/// PROTOFORGE_TEST_SEED overrides the default so failures can be replayed.
inline std::uint64_t base_seed() {
  if (const char* s = std::getenv("PROTOFORGE_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 20260415;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = base_seed()) : gen_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(gen_());
    return out;
  }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---- brute-force rule oracle
//
// Evaluates the three quantified well-formedness formulas directly over the
// raw concept and property tables: parent links are followed by hand and
// prop(c) is recomputed by scanning every property. Nothing here goes
// through the model's own subcon/descendants/prop indexes.

struct Finding {
  std::string rule;
  std::string subject;
  auto operator<=>(const Finding&) const = default;
};

inline std::optional<onto::ConceptRef> raw_parent(const onto::OntologyModel& m, onto::ConceptRef c) {
  return m.concepts()[c.index].parent;
}

inline bool below_anchor(const onto::OntologyModel& m, onto::ConceptRef c, const std::string& anchor) {
  auto cur = raw_parent(m, c);
  while (cur) {
    if (m.concepts()[cur->index].name == anchor) return true;
    cur = raw_parent(m, *cur);
  }
  return false;
}

/// exists p in PROP: domain(p) = c and name(p) = name [and mincard = maxcard = 1]
inline bool exists_prop(const onto::OntologyModel& m, onto::ConceptRef c, const std::string& name, bool exactlyOne) {
  for (const auto& p : m.properties()) {
    if (p.domain.index != c.index || p.name != name) continue;
    if (!exactlyOne) return true;
    if (p.card.min == 1 && p.card.max.has_value() && *p.card.max == 1) return true;
  }
  return false;
}

inline std::vector<Finding> rule_oracle(const onto::OntologyModel& m) {
  std::vector<Finding> out;
  for (std::uint32_t i = 0; i < m.concepts().size(); ++i) {
    const onto::ConceptRef c{i};
    const auto& name = m.concepts()[i].name;
    if (below_anchor(m, c, "KnownTerm")) {
      const auto p = raw_parent(m, c);
      const bool cryptoParent = p && exists_prop(m, *p, "SymmEncrypted", false);
      if (!cryptoParent && !exists_prop(m, c, "isOfType", true)) out.push_back({"R1", name});
    }
    if (below_anchor(m, c, "GeneratedTerm")) {
      if (exists_prop(m, c, "RandomNumber", false) && !exists_prop(m, c, "hasLength", true)) out.push_back({"R2", name});
    }
    if (below_anchor(m, c, "LoadedTerm")) {
      if (!exists_prop(m, c, "isLoaded", true)) out.push_back({"R3", name});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random model: the eight scaffold concepts plus up to `extraConcepts`
/// random ones, and up to `maxProps` properties drawn from a vocabulary
/// biased toward the rule-relevant names.
inline semspec::SemSpec random_spec(Rng& rng, std::size_t extraConcepts = 12, std::size_t maxProps = 20) {
  auto b = semspec::scaffold_builder();
  std::vector<onto::ConceptRef> all;
  for (std::uint32_t i = 0; i < 8; ++i) all.push_back(onto::ConceptRef{i});
  const auto n = rng.below(extraConcepts + 1);
  for (std::size_t i = 0; i < n; ++i) {
    // Never hang concepts off the root directly; that would leave them outside every sub-ontology.
    const auto parent = all[1 + rng.below(all.size() - 1)];
    all.push_back(b.add_concept("C" + std::to_string(i), parent));
  }
  static const std::vector<std::string> names{"isOfType", "SymmEncrypted", "RandomNumber", "hasLength",
                                              "isLoaded", "isStored",      "hasKey"};
  const auto np = rng.below(maxProps + 1);
  for (std::size_t i = 0; i < np; ++i) {
    const auto domain = rng.pick(all);
    const auto range = rng.pick(all);
    onto::Cardinality card;
    card.min = static_cast<std::uint32_t>(rng.below(3));
    if (rng.chance(0.8)) card.max = card.min + static_cast<std::uint32_t>(rng.below(2));
    b.add_property(rng.pick(names), domain, range, card);
  }
  return semspec::SemSpec(b.build(), "http://protoforge.example/random");
}

inline std::vector<Finding> findings(const std::vector<Diagnostic>& ds) {
  std::vector<Finding> out;
  for (const auto& d : ds) out.push_back({d.rule.id, d.subject});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pft
