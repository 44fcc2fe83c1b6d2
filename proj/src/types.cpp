#include <algorithm>
#include <sstream>

#include "horsmc/typing.hpp"

namespace horsmc {

Intersection make_intersection(std::vector<TypeMember> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

int TypeTable::intern(ITypeNode node) {
  auto it = index_.find(node);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  index_.emplace(node, id);
  nodes_.push_back(std::move(node));
  return id;
}

int TypeTable::atomic(int state) { return intern(ITypeNode{{}, state}); }

int TypeTable::arrow(std::vector<Intersection> args, int result) {
  for (auto& a : args) a = make_intersection(std::move(a));
  return intern(ITypeNode{std::move(args), result});
}

int TypeTable::drop(int id, int k) {
  if (k == 0) return id;
  const ITypeNode& n = node(id);
  if (k > static_cast<int>(n.args.size())) throw Error("type has fewer arguments than supplied");
  ITypeNode rest{std::vector<Intersection>(n.args.begin() + k, n.args.end()), n.result};
  return intern(std::move(rest));
}

std::string TypeTable::str(int id, const Awt& awt) const {
  const ITypeNode& n = node(id);
  std::string out;
  for (const auto& a : n.args) {
    if (a.empty()) {
      out += "top -> ";
      continue;
    }
    std::string part;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string m = str(a[i].type, awt);
      if (arity(a[i].type) > 0) m = "(" + m + ")";
      if (a[i].tag > 0) m += "@" + std::to_string(a[i].tag);
      part += (i ? " /\\ " : "") + m;
    }
    out += a.size() > 1 ? "(" + part + ") -> " : part + " -> ";
  }
  return out + awt.state_name(n.result);
}

bool TypeTable::refines(int id, const Sort& sort) const {
  const ITypeNode& n = node(id);
  const Sort* s = &sort;
  for (const auto& a : n.args) {
    if (s->is_ground()) return false;
    for (const auto& m : a)
      if (!refines(m.type, *s->arg())) return false;
    s = s->result().get();
  }
  return s->is_ground();
}

bool Environment::contains(const Binding& b) const {
  return std::find(bindings.begin(), bindings.end(), b) != bindings.end();
}

Environment make_environment(std::vector<Binding> bindings, const Scheme& scheme, const TypeTable& types,
                             const Awt& awt) {
  std::vector<std::pair<std::pair<std::string, std::string>, Binding>> keyed;
  for (const auto& b : bindings)
    keyed.push_back({{scheme.rule(b.nonterminal).head, types.str(b.type, awt)}, b});
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  Environment env;
  for (const auto& [key, b] : keyed)
    if (env.bindings.empty() || !(env.bindings.back() == b)) env.bindings.push_back(b);
  return env;
}

std::string binding_str(const Binding& b, const Scheme& scheme, const TypeTable& types, const Awt& awt) {
  return scheme.rule(b.nonterminal).head + " : " + types.str(b.type, awt);
}

std::string dump_environment(const Environment& env, const Scheme& scheme, const TypeTable& types,
                             const Awt& awt) {
  std::ostringstream out;
  for (const auto& b : env.bindings) out << binding_str(b, scheme, types, awt) << ".\n";
  return out.str();
}

}  // namespace horsmc
