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

#include "protoforge/planner.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "protoforge/rules.hpp"

namespace protoforge::plan {

namespace {

using onto::ConceptRef;
using semspec::SemSpec;
namespace vocab = semspec::vocab;

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::size_t errors = 0;
  const Diagnostic* first = nullptr;
  for (const auto& d : ds) {
    if (d.severity != Severity::Error) continue;
    ++errors;
    if (first == nullptr) first = &d;
  }
  std::string out = std::to_string(errors) + " error diagnostic(s)";
  if (first != nullptr) out += "; first: " + format_line(*first);
  return out;
}

std::vector<ConceptRef> components_of(const onto::OntologyModel& m, ConceptRef c) {
  std::vector<ConceptRef> out;
  for (const auto child : m.subcon(c)) {
    for (const auto id : m.find_properties(child, vocab::kIsExtracted)) {
      const auto* r = std::get_if<ConceptRef>(&m.range(id));
      if (r != nullptr && *r == c) {
        out.push_back(child);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [&](ConceptRef a, ConceptRef b) { return m.concept_name(a) < m.concept_name(b); });
  return out;
}

/// (module locator, item id) for a concept carrying isLoaded.
std::optional<std::pair<std::string, std::string>> load_target(const onto::OntologyModel& m, ConceptRef c) {
  const auto ids = m.find_properties(c, vocab::kIsLoaded);
  if (ids.empty()) return std::nullopt;
  const auto& p = m.property(ids.front());
  std::string module;
  if (const auto* r = std::get_if<ConceptRef>(&p.range)) {
    module = semspec::literal_of(m, *r, vocab::kHasLocator).value_or(m.concept_name(*r));
  } else {
    module = p.value.value_or("");
  }
  auto item = semspec::literal_of(m, c, vocab::kHasIdentifier).value_or(m.concept_name(c));
  return std::make_pair(std::move(module), std::move(item));
}

std::optional<std::string> algorithm_from(const onto::OntologyModel& m, ConceptRef c, std::string_view prop) {
  for (const auto id : m.find_properties(c, prop)) {
    const auto& p = m.property(id);
    if (const auto* r = std::get_if<ConceptRef>(&p.range)) {
      const auto values = m.instance_values(*r);
      if (!values.empty()) return values.front();
    } else if (p.value) {
      return p.value;
    }
  }
  return std::nullopt;
}

std::string resolve_algorithm(const onto::OntologyModel& m, ConceptRef c) {
  const auto& name = m.concept_name(c);
  std::vector<std::pair<std::string_view, std::string_view>> wanted;  // (property, token prefix)
  if (semspec::has_property(m, c, vocab::kIsSigned)) {
    wanted = {{vocab::kHasSignatureAlgorithm, "sig:"}};
  } else if (semspec::has_property(m, c, vocab::kSymmEncrypted)) {
    wanted = {{vocab::kHasSymmetricAlgorithm, "sym:"}};
  } else {
    wanted = {{vocab::kHasSymmetricAlgorithm, "sym:"}, {vocab::kHasAsymmetricAlgorithm, "asym:"}};
  }
  for (const auto& [prop, prefix] : wanted) {
    const auto alg = algorithm_from(m, c, prop);
    if (!alg) continue;
    if (!semspec::is_registered_algorithm(*alg) || alg->rfind(prefix, 0) != 0) {
      throw Error(Errc::MissingAlgorithm, "'" + name + "' names unusable algorithm '" + *alg + "'");
    }
    return *alg;
  }
  throw Error(Errc::MissingAlgorithm, "cryptographic term '" + name + "' has no usable algorithm property");
}

std::uint32_t resolve_length(const onto::OntologyModel& m, ConceptRef c) {
  const auto text = semspec::literal_of(m, c, vocab::kHasLength);
  const auto& name = m.concept_name(c);
  if (!text) throw Error(Errc::InvalidLength, "random term '" + name + "' has no hasLength value");
  std::uint32_t bits = 0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), bits);
  if (ec != std::errc() || ptr != text->data() + text->size() || bits == 0 || bits % 8 != 0 || bits > 65536) {
    throw Error(Errc::InvalidLength, "random term '" + name + "' has unusable length '" + *text + "'");
  }
  return bits;
}

TermAction action(ActionKind kind, const std::string& subject) {
  TermAction a;
  a.kind = kind;
  a.subject = subject;
  return a;
}

struct Container {
  std::string name;
  std::uint32_t position;
};

TermPlan plan_term(ConceptRef c, Direction dir, const SemSpec& spec, int depth, const std::optional<Container>& in) {
  const auto& m = spec.model();
  const auto& name = m.concept_name(c);
  if (depth > kMaxDepth) {
    throw Error(Errc::CyclicDependency, "term nesting deeper than " + std::to_string(kMaxDepth) + " at '" + name + "'");
  }
  TermPlan tp;
  tp.concept_name = name;
  const auto typeTag = semspec::literal_of(m, c, vocab::kIsOfType);
  const bool crypto = semspec::is_cryptographic(m, c);
  const bool signature = semspec::has_property(m, c, vocab::kIsSigned);

  std::optional<TermAction> cryptoAction;
  if (crypto) {
    const auto key = semspec::concept_range_of(m, c, vocab::kHasKey);
    if (!key) throw Error(Errc::MissingKeyProperty, "cryptographic term '" + name + "' has no hasKey concept");
    const auto kind = dir == Direction::Output ? (signature ? ActionKind::SignUnder : ActionKind::EncryptUnder)
                                               : (signature ? ActionKind::VerifySignature : ActionKind::DecryptUnder);
    cryptoAction = action(kind, name);
    cryptoAction->algorithm = resolve_algorithm(m, c);
    cryptoAction->key = value_source(*key, spec);
    const auto parts = components_of(m, c);
    if (parts.empty()) throw Error(Errc::UnresolvableReference, "cryptographic term '" + name + "' has no components");
    for (std::uint32_t i = 0; i < parts.size(); ++i) {
      const auto sub = dir == Direction::Input ? std::optional<Container>(Container{name, i}) : std::nullopt;
      cryptoAction->payload.push_back(plan_term(parts[i], dir, spec, depth + 1, sub));
    }
  }

  const auto stores = [&] {
    for (const auto id : m.find_properties(c, vocab::kIsStored)) {
      if (const auto* r = std::get_if<ConceptRef>(&m.range(id))) {
        auto a = action(ActionKind::StoreBinding, name);
        a.target = value_source(*r, spec);
        tp.actions.push_back(std::move(a));
      }
    }
  };
  const auto typeCheck = [&] {
    if (!typeTag) return;
    auto a = action(ActionKind::TypeCheck, name);
    a.typeTag = *typeTag;
    tp.actions.push_back(std::move(a));
  };

  if (dir == Direction::Output) {
    if (cryptoAction) {
      tp.actions.push_back(std::move(*cryptoAction));
    } else if (semspec::has_property(m, c, vocab::kRandomNumber)) {
      auto a = action(ActionKind::GenerateRandom, name);
      a.lengthBits = resolve_length(m, c);
      tp.actions.push_back(std::move(a));
    } else if (auto target = load_target(m, c)) {
      auto a = action(ActionKind::LoadFromModule, name);
      a.module = target->first;
      a.item = target->second;
      tp.actions.push_back(std::move(a));
    } else if (auto ref = semspec::concept_range_of(m, c, vocab::kRefersTo)) {
      auto a = action(ActionKind::RecallValue, name);
      a.target = value_source(*ref, spec);
      tp.actions.push_back(std::move(a));
    } else if (!m.instance_values(c).empty()) {
      auto a = action(ActionKind::RecallValue, name);
      a.target = value_source(c, spec);
      tp.actions.push_back(std::move(a));
    } else {
      throw Error(Errc::UnresolvableReference, "output term '" + name + "' has no value source");
    }
    stores();
    typeCheck();
  } else {
    if (in) {
      auto a = action(ActionKind::ExtractComponent, name);
      a.target.concept_name = in->name;
      a.position = in->position;
      tp.actions.push_back(std::move(a));
    }
    typeCheck();
    if (cryptoAction) tp.actions.push_back(std::move(*cryptoAction));
    for (const auto id : m.find_properties(c, vocab::kIsVerified)) {
      if (const auto* r = std::get_if<ConceptRef>(&m.range(id))) {
        auto a = action(ActionKind::VerifyEquality, name);
        a.target = value_source(*r, spec);
        tp.actions.push_back(std::move(a));
      }
    }
    stores();
  }
  return tp;
}

bool uses_keystore_key(const TermAction& a) {
  return a.algorithm.rfind("asym:", 0) == 0 || a.algorithm.rfind("sig:", 0) == 0;
}

class Replay {
 public:
  explicit Replay(std::size_t step) : step_(step) {}
  void set_step(std::size_t step) { step_ = step; }

  void require(const ValueSource& s, const std::string& why) const {
    if (bound_.contains(s.concept_name) || s.literal || s.keystoreItem) return;
    fail(s.concept_name, why);
  }

  void walk(const std::vector<TermAction>& actions, Direction dir) {
    for (const auto& a : actions) {
      switch (a.kind) {
        case ActionKind::EncryptUnder:
        case ActionKind::SignUnder:
        case ActionKind::DecryptUnder:
        case ActionKind::VerifySignature:
          if (dir == Direction::Output) {
            for (const auto& p : a.payload) walk(p.actions, dir);
          }
          if (uses_keystore_key(a)) {
            if (!a.key.keystoreItem) fail(a.key.concept_name, "key of '" + a.subject + "' is not loadable");
          } else {
            require(a.key, "key of '" + a.subject + "'");
          }
          if (dir == Direction::Input) {
            for (const auto& p : a.payload) walk(p.actions, dir);
          }
          break;
        case ActionKind::RecallValue: require(a.target, "value of '" + a.subject + "'"); break;
        case ActionKind::VerifyEquality: require(a.target, "verification in '" + a.subject + "'"); break;
        case ActionKind::StoreBinding: bound_.insert(a.target.concept_name); break;
        default: break;
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& concept_name, const std::string& why) const {
    throw Error(Errc::DependencyUnsatisfiable, "step " + std::to_string(step_) + ": " + why + " reads '" +
                                                   concept_name + "' before anything binds it");
  }

  std::size_t step_;
  std::set<std::string, std::less<>> bound_;
};

void render(std::ostringstream& out, const TermAction& a, int indent);

void render(std::ostringstream& out, const TermPlan& p, int indent) {
  for (const auto& a : p.actions) render(out, a, indent);
}

void render(std::ostringstream& out, const TermAction& a, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  out << pad << to_string(a.kind) << '(';
  switch (a.kind) {
    case ActionKind::GenerateRandom: out << a.lengthBits; break;
    case ActionKind::LoadFromModule: out << a.module << ", " << a.item; break;
    case ActionKind::TypeCheck: out << a.typeTag; break;
    case ActionKind::EncryptUnder:
    case ActionKind::DecryptUnder:
    case ActionKind::SignUnder:
    case ActionKind::VerifySignature: out << a.algorithm << ", " << a.key.concept_name; break;
    case ActionKind::ExtractComponent: out << a.target.concept_name << ", " << a.position; break;
    default: out << a.target.concept_name; break;
  }
  out << ")\n";
  for (const auto& p : a.payload) {
    out << pad << "  component " << p.concept_name << '\n';
    render(out, p, indent + 2);
  }
}

void flatten_into(const std::vector<TermAction>& actions, Direction dir, std::vector<const TermAction*>& out) {
  for (const auto& a : actions) {
    if (dir == Direction::Input) out.push_back(&a);
    for (const auto& p : a.payload) flatten_into(p.actions, dir, out);
    if (dir == Direction::Output) out.push_back(&a);
  }
}

}  // namespace

std::string_view to_string(ActionKind k) noexcept {
  switch (k) {
    case ActionKind::GenerateRandom: return "GenerateRandom";
    case ActionKind::LoadFromModule: return "LoadFromModule";
    case ActionKind::RecallValue: return "RecallValue";
    case ActionKind::TypeCheck: return "TypeCheck";
    case ActionKind::EncryptUnder: return "EncryptUnder";
    case ActionKind::DecryptUnder: return "DecryptUnder";
    case ActionKind::SignUnder: return "SignUnder";
    case ActionKind::VerifySignature: return "VerifySignature";
    case ActionKind::StoreBinding: return "StoreBinding";
    case ActionKind::VerifyEquality: return "VerifyEquality";
    case ActionKind::ExtractComponent: return "ExtractComponent";
  }
  return "?";
}

bool TermAction::operator==(const TermAction&) const = default;

SpecRejected::SpecRejected(std::vector<Diagnostic> diagnostics)
    : Error(Errc::SpecRejected, join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ValueSource value_source(ConceptRef c, const SemSpec& spec) {
  const auto& m = spec.model();
  ValueSource s;
  s.concept_name = m.concept_name(c);
  const auto values = m.instance_values(c);
  if (!values.empty()) s.literal = values.front();
  if (auto target = load_target(m, c); target && target->first == "keystore") s.keystoreItem = target->second;
  return s;
}

TermPlan plan_element(ConceptRef c, Direction direction, const SemSpec& spec) {
  static_cast<void>(spec.model().concept_decl(c));
  return plan_term(c, direction, spec, 0, std::nullopt);
}

RolePlan plan_role(const seqspec::RoleSpec& role, const SemSpec& spec) {
  std::vector<Diagnostic> problems;
  for (auto& d : seqspec::validate_seqspec(role)) problems.push_back(std::move(d));
  for (auto& d : seqspec::cross_check(role, spec)) problems.push_back(std::move(d));
  for (auto& d : rules::check_all(spec, false)) problems.push_back(std::move(d));
  if (has_errors(problems)) throw SpecRejected(std::move(problems));

  RolePlan plan;
  plan.role = role.roleName;
  for (const auto& op : role.operations) {
    const auto* msg = role.find_message(op.message);
    if (msg == nullptr) throw Error(Errc::UnresolvedMessageRef, "operation '" + op.name + "' has no message");
    MessageStep step;
    step.direction = op.direction;
    step.operation = op.name;
    step.message = msg->name;
    for (const auto& el : msg->elements) {
      const auto c = semspec::resolve_reference(spec, el.modelReference);
      step.elements.push_back({el, plan_element(c, op.direction, spec)});
    }
    plan.steps.push_back(std::move(step));
  }
  for (const auto& a : role.preconditions) {
    plan.preconditions.push_back({a.name, value_source(semspec::resolve_reference(spec, a.modelReference), spec)});
  }
  for (const auto& a : role.effects) {
    plan.effects.push_back({a.name, value_source(semspec::resolve_reference(spec, a.modelReference), spec)});
  }

  Replay replay(0);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    replay.set_step(i + 1);
    for (const auto& el : plan.steps[i].elements) replay.walk(el.plan.actions, plan.steps[i].direction);
  }
  return plan;
}

std::string dump(const TermPlan& plan, int indent) {
  std::ostringstream out;
  render(out, plan, indent);
  return out.str();
}

std::string dump(const RolePlan& plan) {
  std::ostringstream out;
  out << "role " << plan.role << '\n';
  for (const auto& c : plan.preconditions) out << "precondition " << c.name << " -> " << c.source.concept_name << '\n';
  for (const auto& c : plan.effects) out << "effect " << c.name << " -> " << c.source.concept_name << '\n';
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    out << "step " << i + 1 << ' ' << s.operation << ' ' << seqspec::to_string(s.direction) << ' ' << s.message << '\n';
    for (const auto& el : s.elements) {
      out << "  element \"" << el.element.name << "\" -> " << el.plan.concept_name << '\n';
      render(out, el.plan, 2);
    }
  }
  return out.str();
}

std::vector<const TermAction*> flatten(const RolePlan& plan) {
  std::vector<const TermAction*> out;
  for (const auto& s : plan.steps) {
    for (const auto& el : s.elements) flatten_into(el.plan.actions, s.direction, out);
  }
  return out;
}

}  // namespace protoforge::plan
