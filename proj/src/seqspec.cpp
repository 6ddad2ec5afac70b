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

#include "protoforge/seqspec.hpp"

#include <map>
#include <set>

#include "protoforge/error.hpp"
#include "protoforge/xml.hpp"

namespace protoforge::seqspec {

namespace {

[[noreturn]] void syntax(const xml::Element& el, const std::string& what) {
  throw xml::SyntaxError(el.line, el.column, what);
}

const std::string& required(const xml::Element& el, std::string_view name) {
  const auto* v = el.attr(name);
  if (v == nullptr) syntax(el, "<" + el.qname() + "> is missing attribute '" + std::string(name) + "'");
  return *v;
}

std::string model_reference(const xml::Element& el) {
  const auto* v = el.attr(kWssemNamespace, "modelReference");
  return v != nullptr ? *v : std::string();
}

MessageDecl parse_message(const xml::Element& el) {
  MessageDecl msg;
  msg.name = required(el, "name");
  const xml::Element* sequence = nullptr;
  for (const auto& c : el.children) {
    if (!c.is(kXsdNamespace, "complexType")) syntax(c, "expected xsd:complexType in message '" + msg.name + "'");
    for (const auto& s : c.children) {
      if (!s.is(kXsdNamespace, "sequence")) syntax(s, "expected xsd:sequence in message '" + msg.name + "'");
      if (sequence != nullptr) syntax(s, "message '" + msg.name + "' has more than one sequence");
      sequence = &s;
    }
  }
  if (sequence == nullptr) return msg;
  std::set<std::string> seen;
  for (const auto& e : sequence->children) {
    if (!e.is(kXsdNamespace, "element")) syntax(e, "expected xsd:element in message '" + msg.name + "'");
    ElementDecl decl;
    decl.name = required(e, "name");
    const auto [typeNs, typeLocal] = e.resolve_qname(required(e, "type"));
    if (typeNs != kXsdNamespace) syntax(e, "element '" + decl.name + "' has a non-xsd type");
    if (typeLocal == "string") {
      decl.type = XsdType::Text;
    } else if (typeLocal == "base64Binary") {
      decl.type = XsdType::Base64Binary;
    } else {
      syntax(e, "element type xsd:" + typeLocal + " is not supported");
    }
    decl.modelReference = model_reference(e);
    if (!seen.insert(decl.name).second) {
      throw Error(Errc::DuplicateElement,
                  "line " + std::to_string(e.line) + ": element '" + decl.name + "' repeated in message '" + msg.name + "'");
    }
    msg.elements.push_back(std::move(decl));
  }
  return msg;
}

std::string message_ref(const xml::Element& el, const std::string& targetNamespace) {
  const auto [ns, local] = el.resolve_qname(required(el, "message"));
  if (ns != targetNamespace) {
    throw Error(Errc::UnresolvedMessageRef,
                "line " + std::to_string(el.line) + ": message reference outside the target namespace");
  }
  return local;
}

Diagnostic structural(std::string id, std::string subject, std::string message) {
  RuleDescriptor d{std::move(id), RuleCategory::Structure, RuleOrigin::Extrapolated, "sequential specification structure"};
  return Diagnostic{std::move(d), std::move(subject), std::move(message), Severity::Error};
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::Input ? "input" : "output"; }

const MessageDecl* RoleSpec::find_message(std::string_view name) const {
  for (const auto& m : messages) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

RoleSpec parse_seqspec(std::string_view document) {
  const auto root = xml::parse(document);
  if (!root.is(kWsdlNamespace, "definitions")) syntax(root, "root element must be wsdl:definitions");
  RoleSpec role;
  role.roleName = required(root, "name");
  role.targetNamespace = required(root, "targetNamespace");

  const xml::Element* portType = nullptr;
  const xml::Element* binding = nullptr;
  for (const auto& child : root.children) {
    if (child.is(kWsdlNamespace, "types")) {
      for (const auto& schema : child.children) {
        if (!schema.is(kXsdNamespace, "schema")) syntax(schema, "expected xsd:schema");
        for (const auto& el : schema.children) {
          if (!el.is(kXsdNamespace, "element")) syntax(el, "expected top-level xsd:element");
          auto msg = parse_message(el);
          if (role.find_message(msg.name) != nullptr) {
            throw Error(Errc::DuplicateElement,
                        "line " + std::to_string(el.line) + ": message '" + msg.name + "' declared twice");
          }
          role.messages.push_back(std::move(msg));
        }
      }
    } else if (child.is(kWsdlNamespace, "portType")) {
      if (portType != nullptr) {
        throw Error(Errc::MultiplePortTypes,
                    "line " + std::to_string(child.line) + ": a role document holds exactly one portType");
      }
      portType = &child;
    } else if (child.is(kWsdlNamespace, "binding")) {
      if (binding != nullptr) {
        throw Error(Errc::MultipleBindings,
                    "line " + std::to_string(child.line) + ": a role document holds exactly one binding");
      }
      binding = &child;
    } else if (child.is(kWssemNamespace, "precondition")) {
      role.preconditions.push_back({required(child, "name"), model_reference(child)});
    } else if (child.is(kWssemNamespace, "effect")) {
      role.effects.push_back({required(child, "name"), model_reference(child)});
    } else {
      syntax(child, "unexpected element <" + child.qname() + ">");
    }
  }
  if (portType == nullptr) syntax(root, "missing wsdl:portType");
  if (binding == nullptr) syntax(root, "missing wsdl:binding");
  role.portTypeName = required(*portType, "name");
  role.bindingName = required(*binding, "name");
  const auto [bindNs, bindLocal] = binding->resolve_qname(required(*binding, "type"));
  if (bindNs != role.targetNamespace || bindLocal != role.portTypeName) {
    syntax(*binding, "binding type does not name the portType");
  }

  for (const auto& op : portType->children) {
    if (!op.is(kWsdlNamespace, "operation")) syntax(op, "expected wsdl:operation");
    if (op.children.size() != 1) syntax(op, "an operation holds exactly one wsdl:input or wsdl:output");
    const auto& io = op.children.front();
    OperationDecl decl;
    decl.name = required(op, "name");
    if (io.is(kWsdlNamespace, "input")) {
      decl.direction = Direction::Input;
    } else if (io.is(kWsdlNamespace, "output")) {
      decl.direction = Direction::Output;
    } else {
      syntax(io, "expected wsdl:input or wsdl:output");
    }
    decl.message = message_ref(io, role.targetNamespace);
    if (role.find_message(decl.message) == nullptr) {
      throw Error(Errc::UnresolvedMessageRef, "line " + std::to_string(io.line) + ": operation '" + decl.name +
                                                  "' references undeclared message '" + decl.message + "'");
    }
    role.operations.push_back(std::move(decl));
  }
  return role;
}

std::string serialize_seqspec(const RoleSpec& role) {
  xml::Element root;
  root.prefix = "wsdl";
  root.local = "definitions";
  root.set_attr("xmlns:wsdl", std::string(kWsdlNamespace));
  root.set_attr("xmlns:xsd", std::string(kXsdNamespace));
  root.set_attr("xmlns:wssem", std::string(kWssemNamespace));
  root.set_attr("xmlns:tns", role.targetNamespace);
  root.set_attr("name", role.roleName);
  root.set_attr("targetNamespace", role.targetNamespace);

  auto& schema = root.add_child("wsdl:types").add_child("xsd:schema");
  for (const auto& msg : role.messages) {
    auto& m = schema.add_child("xsd:element");
    m.set_attr("name", msg.name);
    auto& seq = m.add_child("xsd:complexType").add_child("xsd:sequence");
    for (const auto& e : msg.elements) {
      auto& x = seq.add_child("xsd:element");
      x.set_attr("name", e.name);
      x.set_attr("type", e.type == XsdType::Text ? "xsd:string" : "xsd:base64Binary");
      if (!e.modelReference.empty()) x.set_attr("wssem:modelReference", e.modelReference);
    }
  }

  auto& portType = root.add_child("wsdl:portType");
  portType.set_attr("name", role.portTypeName);
  for (const auto& op : role.operations) {
    auto& o = portType.add_child("wsdl:operation");
    o.set_attr("name", op.name);
    o.add_child(op.direction == Direction::Input ? "wsdl:input" : "wsdl:output").set_attr("message", "tns:" + op.message);
  }
  auto& binding = root.add_child("wsdl:binding");
  binding.set_attr("name", role.bindingName);
  binding.set_attr("type", "tns:" + role.portTypeName);

  for (const auto& a : role.preconditions) {
    auto& p = root.add_child("wssem:precondition");
    p.set_attr("name", a.name);
    if (!a.modelReference.empty()) p.set_attr("wssem:modelReference", a.modelReference);
  }
  for (const auto& a : role.effects) {
    auto& p = root.add_child("wssem:effect");
    p.set_attr("name", a.name);
    if (!a.modelReference.empty()) p.set_attr("wssem:modelReference", a.modelReference);
  }
  return xml::write(root);
}

std::vector<Diagnostic> validate_seqspec(const RoleSpec& role) {
  std::vector<Diagnostic> out;
  if (role.operations.empty()) {
    out.push_back(structural("S-EMPTY", role.roleName, "role declares no operations (no input and no output)"));
  }
  std::map<std::string, int> uses;
  for (const auto& op : role.operations) ++uses[op.message];
  for (const auto& msg : role.messages) {
    const auto n = uses[msg.name];
    if (n == 0) {
      out.push_back(structural("S-ORPHAN", msg.name, "message is not referenced by any operation"));
    } else if (n > 1) {
      out.push_back(structural("S-MULTIREF", msg.name, "message is referenced by " + std::to_string(n) + " operations"));
    }
    if (msg.elements.empty()) out.push_back(structural("S-NOELEM", msg.name, "message declares no elements"));
    for (const auto& e : msg.elements) {
      const auto hash = e.modelReference.rfind('#');
      if (e.modelReference.empty() || hash == std::string::npos || hash + 1 == e.modelReference.size()) {
        out.push_back(structural("S-NOREF", e.name, "element in '" + msg.name + "' has no fragment-bearing modelReference"));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> cross_check(const RoleSpec& role, const semspec::SemSpec& spec) {
  std::vector<Diagnostic> out;
  const auto check = [&](const std::string& subject, const std::string& ref) {
    try {
      semspec::resolve_reference(spec, ref);
    } catch (const Error& e) {
      out.push_back(structural("S-XREF", subject, "'" + ref + "' does not resolve: " + e.what()));
    }
  };
  for (const auto& msg : role.messages) {
    for (const auto& e : msg.elements) check(e.name, e.modelReference);
  }
  for (const auto& a : role.preconditions) check(a.name, a.modelReference);
  for (const auto& a : role.effects) check(a.name, a.modelReference);
  return out;
}

}  // namespace protoforge::seqspec
