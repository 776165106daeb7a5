#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cadshrink/numeric.hpp"

namespace cadshrink {

/// Every constructor of the Caddy language family. `ClassRef` never appears
/// in parsed programs; it marks a leaf that stands for an existing e-class.
enum class Op : std::uint8_t {
  Num,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Vec2,
  Vec3,
  Cuboid,
  Sphere,
  Cylinder,
  HexPrism,
  Translate,
  Rotate,
  Scale,
  TranslateSpherical,
  Union,
  Difference,
  Intersection,
  Fold,
  List,
  Concat,
  Tabulate,
  Map2,
  Repeat,
  Sort,
  Unsort,
  Part,
  Unpart,
  Spherical,
  Unspherical,
  ClassRef,
};

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);

bool is_arith(Op op);
bool is_primitive(Op op);
bool is_affine(Op op);  // includes TranslateSpherical
bool is_binop(Op op);
bool is_inverse(Op op);  // Sort, Unsort, Part, Unpart, Spherical, Unspherical

/// Zero-based gather sequence: (Sort p l)[k] = l[p[k]].
struct Permutation {
  std::vector<int> indices;

  std::size_t size() const { return indices.size(); }
  bool valid() const;
  Permutation inverse() const;
  bool is_identity() const;
  auto operator<=>(const Permutation&) const = default;
};

/// Sublist lengths; their sum is the flattened list length.
struct Partitioning {
  std::vector<int> lengths;

  std::size_t total() const;
  bool valid() const;
  auto operator<=>(const Partitioning&) const = default;
};

struct Binding {
  std::string var;
  int bound = 1;
  auto operator<=>(const Binding&) const = default;
};
using Bindings = std::vector<Binding>;

/// Per-constructor payload:
///   Num -> double, Var -> string, Fold/Map2 -> Op (the binop/affine kind),
///   Repeat/Spherical/Unspherical -> int count, ClassRef -> int id,
///   Sort/Unsort -> Permutation, Part/Unpart -> Partitioning, Tabulate -> Bindings.
using Payload = std::variant<std::monostate, double, std::string, Op, int, Permutation, Partitioning, Bindings>;

struct Head {
  Op op = Op::Num;
  Payload payload;

  bool operator==(const Head&) const = default;
};

std::size_t hash_head(const Head& head);
std::strong_ordering compare_head(const Head& a, const Head& b);

/// Immutable tree of Caddy syntax. Copies share structure.
class Expr {
 public:
  Expr() = default;
  Expr(Head head, std::vector<Expr> children);

  bool empty() const { return !node_; }
  const Head& head() const { return node_->head; }
  Op op() const { return node_->head.op; }
  const Payload& payload() const { return node_->head.payload; }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }

  double num() const { return std::get<double>(payload()); }
  const std::string& name() const { return std::get<std::string>(payload()); }
  Op kind() const { return std::get<Op>(payload()); }
  int count() const { return std::get<int>(payload()); }
  const Permutation& perm() const { return std::get<Permutation>(payload()); }
  const Partitioning& part() const { return std::get<Partitioning>(payload()); }
  const Bindings& bindings() const { return std::get<Bindings>(payload()); }

  bool operator==(const Expr& other) const;

 private:
  struct Node {
    Head head;
    std::vector<Expr> children;
  };
  std::shared_ptr<const Node> node_;
};

std::size_t hash_expr(const Expr& e);

namespace mk {

Expr num(double value);
Expr var(std::string name);
Expr arith(Op op, Expr lhs, Expr rhs);
Expr vec2(Expr a, Expr b);
Expr vec3(Expr x, Expr y, Expr z);
Expr vec3(const Vec3d& v);
Expr vec2(double a, double b);
Expr cuboid(Expr dims);
Expr sphere(Expr radius);
Expr cylinder(Expr params);
Expr hexprism(Expr params);
Expr primitive(Op op, Expr params);
Expr affine(Op kind, Expr params, Expr child);
Expr binop(Op kind, Expr lhs, Expr rhs);
Expr fold(Op kind, Expr list);
Expr list(std::vector<Expr> items);
Expr concat(std::vector<Expr> lists);
Expr tabulate(Bindings bindings, Expr body);
Expr map2(Op kind, Expr params, Expr cads);
Expr repeat(int count, Expr item);
Expr sort(Permutation p, Expr list);
Expr unsort(Permutation p, Expr list);
Expr part(Partitioning p, Expr list);
Expr unpart(Partitioning p, std::vector<Expr> lists);
Expr spherical(int count, Expr center, Expr list);
Expr unspherical(int count, Expr center, Expr list);
Expr class_ref(std::uint32_t id);

}  // namespace mk

/// Names not bound by an enclosing Tabulate.
std::set<std::string> free_vars(const Expr& e);

/// Replaces free occurrences of `var` with a numeric literal.
Expr substitute(const Expr& e, const std::string& var, double value);

/// Core Caddy: literals, vectors, primitives, Translate/Rotate/Scale and binops.
bool is_core(const Expr& e);

/// Number of nodes in the tree.
std::size_t tree_size(const Expr& e);

}  // namespace cadshrink
