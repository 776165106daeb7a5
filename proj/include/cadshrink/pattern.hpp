#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cadshrink/egraph.hpp"

namespace cadshrink {

/// A term with holes. `?x` binds one class, a trailing `?xs...` binds the
/// remaining children of a variadic node.
struct Pattern {
  enum class Kind { Var, Rest, Node };
  Kind kind = Kind::Node;
  std::string var;
  Head head;
  bool any_payload = false;  // match the operator whatever its payload
  std::vector<Pattern> children;

  static Pattern parse(std::string_view text);
  static Pattern from_expr(const Expr& e);
  static Pattern var_of(std::string name);
  static Pattern rest_of(std::string name);
  /// Node pattern ignoring the payload (Sort, Unsort, Unpart, Repeat ...).
  static Pattern any(Op op, std::vector<Pattern> children);
  std::string str() const;
};

struct Subst {
  std::map<std::string, ClassId> vars;
  std::map<std::string, std::vector<ClassId>> rests;

  ClassId operator[](const std::string& name) const { return vars.at(name); }
  const std::vector<ClassId>& rest(const std::string& name) const { return rests.at(name); }
  bool operator==(const Subst&) const = default;
};

struct Match {
  ClassId root = 0;
  Subst subst;
  /// The class node the pattern root matched (for variadic rules that want
  /// the concrete child list).
  ENode node;
};

/// Every (class, substitution) pair where the class represents the pattern.
/// The graph must be clean (rebuilt).
std::vector<Match> search(const EGraph& g, const Pattern& p);
/// Same as search, restricted to `classes` (e.g. those holding the root operator).
std::vector<Match> search_in(const EGraph& g, const Pattern& p, const std::vector<ClassId>& classes);
std::vector<Match> search_class(const EGraph& g, const Pattern& p, ClassId c);

}  // namespace cadshrink
