#include "cadshrink/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace cadshrink {

namespace {

struct OpInfo {
  Op op;
  std::string_view name;
};

constexpr std::array kOps = {
    OpInfo{Op::Num, "Num"},
    OpInfo{Op::Var, "Var"},
    OpInfo{Op::Add, "+"},
    OpInfo{Op::Sub, "-"},
    OpInfo{Op::Mul, "*"},
    OpInfo{Op::Div, "/"},
    OpInfo{Op::Vec2, "Vec2"},
    OpInfo{Op::Vec3, "Vec3"},
    OpInfo{Op::Cuboid, "Cuboid"},
    OpInfo{Op::Sphere, "Sphere"},
    OpInfo{Op::Cylinder, "Cylinder"},
    OpInfo{Op::HexPrism, "HexPrism"},
    OpInfo{Op::Translate, "Translate"},
    OpInfo{Op::Rotate, "Rotate"},
    OpInfo{Op::Scale, "Scale"},
    OpInfo{Op::TranslateSpherical, "TranslateSpherical"},
    OpInfo{Op::Union, "Union"},
    OpInfo{Op::Difference, "Difference"},
    OpInfo{Op::Intersection, "Intersection"},
    OpInfo{Op::Fold, "Fold"},
    OpInfo{Op::List, "List"},
    OpInfo{Op::Concat, "Concat"},
    OpInfo{Op::Tabulate, "Tabulate"},
    OpInfo{Op::Map2, "Map2"},
    OpInfo{Op::Repeat, "Repeat"},
    OpInfo{Op::Sort, "Sort"},
    OpInfo{Op::Unsort, "Unsort"},
    OpInfo{Op::Part, "Part"},
    OpInfo{Op::Unpart, "Unpart"},
    OpInfo{Op::Spherical, "Spherical"},
    OpInfo{Op::Unspherical, "Unspherical"},
    OpInfo{Op::ClassRef, "ClassRef"},
};

inline std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_double(double d) {
  if (d == 0.0) d = 0.0;  // fold -0.0
  return std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(d));
}

}  // namespace

std::string_view op_name(Op op) { return kOps[static_cast<std::size_t>(op)].name; }

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& info : kOps) {
    if (info.name == name) return info.op;
  }
  if (name == "Cube") return Op::Cuboid;
  if (name == "Hexprism") return Op::HexPrism;
  return std::nullopt;
}

bool is_arith(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div; }
bool is_primitive(Op op) {
  return op == Op::Cuboid || op == Op::Sphere || op == Op::Cylinder || op == Op::HexPrism;
}
bool is_affine(Op op) {
  return op == Op::Translate || op == Op::Rotate || op == Op::Scale || op == Op::TranslateSpherical;
}
bool is_binop(Op op) { return op == Op::Union || op == Op::Difference || op == Op::Intersection; }
bool is_inverse(Op op) {
  return op == Op::Sort || op == Op::Unsort || op == Op::Part || op == Op::Unpart || op == Op::Spherical ||
         op == Op::Unspherical;
}

bool Permutation::valid() const {
  std::vector<bool> seen(indices.size(), false);
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= indices.size() || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.indices.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) inv.indices[indices[k]] = static_cast<int>(k);
  return inv;
}

bool Permutation::is_identity() const {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] != static_cast<int>(k)) return false;
  }
  return true;
}

std::size_t Partitioning::total() const {
  return std::accumulate(lengths.begin(), lengths.end(), std::size_t{0},
                         [](std::size_t acc, int l) { return acc + static_cast<std::size_t>(l); });
}

bool Partitioning::valid() const {
  return !lengths.empty() && std::all_of(lengths.begin(), lengths.end(), [](int l) { return l > 0; });
}

std::size_t hash_head(const Head& head) {
  std::size_t h = std::hash<int>{}(static_cast<int>(head.op));
  h = mix(h, head.payload.index());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
        } else if constexpr (std::is_same_v<T, double>) {
          h = mix(h, hash_double(p));
        } else if constexpr (std::is_same_v<T, std::string>) {
          h = mix(h, std::hash<std::string>{}(p));
        } else if constexpr (std::is_same_v<T, Op>) {
          h = mix(h, static_cast<std::size_t>(p));
        } else if constexpr (std::is_same_v<T, int>) {
          h = mix(h, std::hash<int>{}(p));
        } else if constexpr (std::is_same_v<T, Permutation>) {
          for (int i : p.indices) h = mix(h, std::hash<int>{}(i));
        } else if constexpr (std::is_same_v<T, Partitioning>) {
          for (int i : p.lengths) h = mix(h, std::hash<int>{}(i));
        } else if constexpr (std::is_same_v<T, Bindings>) {
          for (const auto& b : p) h = mix(mix(h, std::hash<std::string>{}(b.var)), std::hash<int>{}(b.bound));
        }
      },
      head.payload);
  return h;
}

std::strong_ordering compare_head(const Head& a, const Head& b) {
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (auto c = a.payload.index() <=> b.payload.index(); c != 0) return c;
  return std::visit(
      [&](const auto& pa) -> std::strong_ordering {
        using T = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<T>(b.payload);
        if constexpr (std::is_same_v<T, std::monostate>) {
          return std::strong_ordering::equal;
        } else if constexpr (std::is_same_v<T, double>) {
          if (pa < pb) return std::strong_ordering::less;
          if (pb < pa) return std::strong_ordering::greater;
          return std::strong_ordering::equal;
        } else {
          return pa <=> pb;
        }
      },
      a.payload);
}

Expr::Expr(Head head, std::vector<Expr> children)
    : node_(std::make_shared<const Node>(Node{std::move(head), std::move(children)})) {}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (!(node_->head == other.node_->head)) return false;
  return node_->children == other.node_->children;
}

std::size_t hash_expr(const Expr& e) {
  std::size_t h = hash_head(e.head());
  for (const auto& c : e.children()) h = mix(h, hash_expr(c));
  return h;
}

namespace mk {

Expr num(double value) { return Expr(Head{Op::Num, value == 0.0 ? 0.0 : value}, {}); }
Expr var(std::string name) { return Expr(Head{Op::Var, std::move(name)}, {}); }
Expr arith(Op op, Expr lhs, Expr rhs) { return Expr(Head{op, {}}, {std::move(lhs), std::move(rhs)}); }
Expr vec2(Expr a, Expr b) { return Expr(Head{Op::Vec2, {}}, {std::move(a), std::move(b)}); }
Expr vec3(Expr x, Expr y, Expr z) { return Expr(Head{Op::Vec3, {}}, {std::move(x), std::move(y), std::move(z)}); }
Expr vec3(const Vec3d& v) { return vec3(num(v[0]), num(v[1]), num(v[2])); }
Expr vec2(double a, double b) { return vec2(num(a), num(b)); }
Expr cuboid(Expr dims) { return Expr(Head{Op::Cuboid, {}}, {std::move(dims)}); }
Expr sphere(Expr radius) { return Expr(Head{Op::Sphere, {}}, {std::move(radius)}); }
Expr cylinder(Expr params) { return Expr(Head{Op::Cylinder, {}}, {std::move(params)}); }
Expr hexprism(Expr params) { return Expr(Head{Op::HexPrism, {}}, {std::move(params)}); }
Expr primitive(Op op, Expr params) { return Expr(Head{op, {}}, {std::move(params)}); }
Expr affine(Op kind, Expr params, Expr child) { return Expr(Head{kind, {}}, {std::move(params), std::move(child)}); }
Expr binop(Op kind, Expr lhs, Expr rhs) { return Expr(Head{kind, {}}, {std::move(lhs), std::move(rhs)}); }
Expr fold(Op kind, Expr list) { return Expr(Head{Op::Fold, kind}, {std::move(list)}); }
Expr list(std::vector<Expr> items) { return Expr(Head{Op::List, {}}, std::move(items)); }
Expr concat(std::vector<Expr> lists) { return Expr(Head{Op::Concat, {}}, std::move(lists)); }
Expr tabulate(Bindings bindings, Expr body) { return Expr(Head{Op::Tabulate, std::move(bindings)}, {std::move(body)}); }
Expr map2(Op kind, Expr params, Expr cads) { return Expr(Head{Op::Map2, kind}, {std::move(params), std::move(cads)}); }
Expr repeat(int count, Expr item) { return Expr(Head{Op::Repeat, count}, {std::move(item)}); }
Expr sort(Permutation p, Expr list) { return Expr(Head{Op::Sort, std::move(p)}, {std::move(list)}); }
Expr unsort(Permutation p, Expr list) { return Expr(Head{Op::Unsort, std::move(p)}, {std::move(list)}); }
Expr part(Partitioning p, Expr list) { return Expr(Head{Op::Part, std::move(p)}, {std::move(list)}); }
Expr unpart(Partitioning p, std::vector<Expr> lists) { return Expr(Head{Op::Unpart, std::move(p)}, std::move(lists)); }
Expr spherical(int count, Expr center, Expr list) {
  return Expr(Head{Op::Spherical, count}, {std::move(center), std::move(list)});
}
Expr unspherical(int count, Expr center, Expr list) {
  return Expr(Head{Op::Unspherical, count}, {std::move(center), std::move(list)});
}
Expr class_ref(std::uint32_t id) { return Expr(Head{Op::ClassRef, static_cast<int>(id)}, {}); }

}  // namespace mk

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (e.op() == Op::Var) {
    if (std::find(bound.begin(), bound.end(), e.name()) == bound.end()) out.insert(e.name());
    return;
  }
  if (e.op() == Op::Tabulate) {
    const auto& bs = e.bindings();
    for (const auto& b : bs) bound.push_back(b.var);
    collect_free(e.child(0), bound, out);
    bound.resize(bound.size() - bs.size());
    return;
  }
  for (const auto& c : e.children()) collect_free(c, bound, out);
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(e, bound, out);
  return out;
}

Expr substitute(const Expr& e, const std::string& var, double value) {
  if (e.op() == Op::Var) return e.name() == var ? mk::num(value) : e;
  if (e.op() == Op::Tabulate) {
    for (const auto& b : e.bindings()) {
      if (b.var == var) return e;
    }
  }
  if (e.arity() == 0) return e;
  std::vector<Expr> kids;
  kids.reserve(e.arity());
  bool changed = false;
  for (const auto& c : e.children()) {
    kids.push_back(substitute(c, var, value));
    changed = changed || !(kids.back() == c);
  }
  return changed ? Expr(e.head(), std::move(kids)) : e;
}

bool is_core(const Expr& e) {
  switch (e.op()) {
    case Op::Num:
      return true;
    case Op::Vec2:
    case Op::Vec3:
      return std::all_of(e.children().begin(), e.children().end(), [](const Expr& c) { return c.op() == Op::Num; });
    case Op::Cuboid:
    case Op::Sphere:
    case Op::Cylinder:
    case Op::HexPrism:
    case Op::Translate:
    case Op::Rotate:
    case Op::Scale:
    case Op::Union:
    case Op::Difference:
    case Op::Intersection:
      return std::all_of(e.children().begin(), e.children().end(), [](const Expr& c) { return is_core(c); });
    default:
      return false;
  }
}

std::size_t tree_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children()) n += tree_size(c);
  return n;
}

}  // namespace cadshrink
