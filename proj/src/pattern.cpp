#include "cadshrink/pattern.hpp"

#include <algorithm>
#include <sstream>

#include "cadshrink/syntax.hpp"

namespace cadshrink {

Pattern Pattern::from_expr(const Expr& e) {
  Pattern p;
  if (e.op() == Op::Var && !e.name().empty() && e.name().front() == '?') {
    const std::string& n = e.name();
    if (n.size() > 3 && n.ends_with("...")) {
      p.kind = Kind::Rest;
      p.var = n.substr(0, n.size() - 3);
    } else {
      p.kind = Kind::Var;
      p.var = n;
    }
    return p;
  }
  p.kind = Kind::Node;
  p.head = canonical_head(e.head());
  for (const auto& c : e.children()) p.children.push_back(from_expr(c));
  return p;
}

Pattern Pattern::var_of(std::string name) {
  Pattern p;
  p.kind = Kind::Var;
  p.var = std::move(name);
  return p;
}

Pattern Pattern::rest_of(std::string name) {
  Pattern p;
  p.kind = Kind::Rest;
  p.var = std::move(name);
  return p;
}

Pattern Pattern::any(Op op, std::vector<Pattern> children) {
  Pattern p;
  p.kind = Kind::Node;
  p.head.op = op;
  p.any_payload = true;
  p.children = std::move(children);
  return p;
}

Pattern Pattern::parse(std::string_view text) { return from_expr(cadshrink::parse(text)); }

std::string Pattern::str() const {
  switch (kind) {
    case Kind::Var: return var;
    case Kind::Rest: return var + "...";
    case Kind::Node: break;
  }
  ENode n;
  n.head = head;
  std::ostringstream out;
  out << (any_payload ? std::string(op_name(head.op)) + "[_]" : describe(n));
  if (!children.empty()) {
    out << '(';
    for (std::size_t i = 0; i < children.size(); ++i) out << (i ? ", " : "") << children[i].str();
    out << ')';
  }
  return out.str();
}

namespace {

using Substs = std::vector<Subst>;

Substs match_class(const EGraph& g, const Pattern& p, ClassId c, Substs in);

bool head_matches(const Pattern& p, const ENode& n) {
  return p.any_payload ? n.head.op == p.head.op : n.head == p.head;
}

Substs match_node(const EGraph& g, const Pattern& p, const ENode& n, Substs in) {
  if (!head_matches(p, n)) return {};
  bool has_rest = !p.children.empty() && p.children.back().kind == Pattern::Kind::Rest;
  std::size_t fixed = has_rest ? p.children.size() - 1 : p.children.size();
  if (has_rest ? n.children.size() < fixed : n.children.size() != fixed) return {};
  Substs cur = std::move(in);
  for (std::size_t i = 0; i < fixed && !cur.empty(); ++i) cur = match_class(g, p.children[i], n.children[i], std::move(cur));
  if (has_rest && !cur.empty()) {
    const std::string& name = p.children.back().var;
    std::vector<ClassId> suffix;
    for (std::size_t i = fixed; i < n.children.size(); ++i) suffix.push_back(g.find(n.children[i]));
    Substs out;
    for (auto& s : cur) {
      auto it = s.rests.find(name);
      if (it == s.rests.end()) {
        s.rests.emplace(name, suffix);
        out.push_back(std::move(s));
      } else if (it->second == suffix) {
        out.push_back(std::move(s));
      }
    }
    cur = std::move(out);
  }
  return cur;
}

Substs match_class(const EGraph& g, const Pattern& p, ClassId c, Substs in) {
  c = g.find(c);
  if (p.kind == Pattern::Kind::Var) {
    Substs out;
    for (auto& s : in) {
      auto it = s.vars.find(p.var);
      if (it == s.vars.end()) {
        s.vars.emplace(p.var, c);
        out.push_back(std::move(s));
      } else if (it->second == c) {
        out.push_back(std::move(s));
      }
    }
    return out;
  }
  Substs out;
  for (const auto& n : g.eclass(c).nodes) {
    if (!head_matches(p, n)) continue;
    Substs got = match_node(g, p, n, in);
    for (auto& s : got) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<Match> search_class(const EGraph& g, const Pattern& p, ClassId c) {
  c = g.find(c);
  std::vector<Match> out;
  if (p.kind != Pattern::Kind::Node) {
    Match m;
    m.root = c;
    if (p.kind == Pattern::Kind::Var) m.subst.vars.emplace(p.var, c);
    out.push_back(std::move(m));
    return out;
  }
  for (const auto& n : g.eclass(c).nodes) {
    if (!head_matches(p, n)) continue;
    for (auto& s : match_node(g, p, n, Substs{Subst{}})) {
      bool dup = std::any_of(out.begin(), out.end(), [&](const Match& m) { return m.subst == s; });
      if (dup) continue;
      Match m;
      m.root = c;
      m.subst = std::move(s);
      m.node = g.canonicalize(n);
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<Match> search(const EGraph& g, const Pattern& p) { return search_in(g, p, g.class_ids()); }

std::vector<Match> search_in(const EGraph& g, const Pattern& p, const std::vector<ClassId>& classes) {
  std::vector<Match> out;
  for (ClassId c : classes) {
    auto ms = search_class(g, p, c);
    for (auto& m : ms) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace cadshrink
