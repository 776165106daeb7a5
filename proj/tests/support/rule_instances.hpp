// Random closed programs that exercise one rewrite each, and the soundness
// check that applies the rewrite and compares both sides after evaluation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cadshrink/egraph.hpp"
#include "cadshrink/equiv.hpp"
#include "cadshrink/eval.hpp"
#include "cadshrink/extract.hpp"
#include "cadshrink/numeric.hpp"
#include "cadshrink/rewrite.hpp"
#include "cadshrink/syntax.hpp"
#include "oracles.hpp"

namespace rules_oracle {

using namespace cadshrink;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed), core_(seed ^ 0x9e3779b97f4a7c15ull) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }
  std::mt19937_64& rng() { return rng_; }

  Expr cad() { return core_.cad(uniform(0, 2)); }
  std::vector<Expr> cads(int n) {
    std::vector<Expr> out;
    for (int k = 0; k < n; ++k) out.push_back(cad());
    return out;
  }

  Vec3d params(Op kind) {
    if (kind == Op::TranslateSpherical) return {double(uniform(1, 5)), 45.0 * uniform(0, 7), 45.0 * uniform(0, 4)};
    return core_.params(kind);
  }
  Expr vec(Op kind) { return mk::vec3(params(kind)); }
  std::vector<Expr> vecs(Op kind, int n) {
    std::vector<Expr> out;
    for (int k = 0; k < n; ++k) out.push_back(vec(kind));
    return out;
  }

  Op affine_kind(bool spherical = true) {
    static constexpr Op kinds[] = {Op::Translate, Op::Rotate, Op::Scale, Op::TranslateSpherical};
    return kinds[uniform(0, spherical ? 3 : 2)];
  }
  Op binop() {
    static constexpr Op ops[] = {Op::Union, Op::Difference, Op::Intersection};
    return ops[uniform(0, 2)];
  }

  Permutation perm(int n) {
    Permutation p;
    for (int k = 0; k < n; ++k) p.indices.push_back(k);
    std::shuffle(p.indices.begin(), p.indices.end(), rng_);
    return p;
  }
  Partitioning part(int n) {
    Partitioning p;
    for (int left = n; left > 0;) {
      int take = uniform(1, left);
      p.lengths.push_back(take);
      left -= take;
    }
    return p;
  }
  std::vector<Expr> split(const std::vector<Expr>& xs, const Partitioning& p) {
    std::vector<Expr> out;
    std::size_t at = 0;
    for (int len : p.lengths) {
      std::vector<Expr> part(xs.begin() + long(at), xs.begin() + long(at) + len);
      out.push_back(mk::list(part));
      at += std::size_t(len);
    }
    return out;
  }

  // A body in `i` for Tabulate: vector or cad.
  Expr vec_body(Op kind) {
    auto comp = [&](int scale) {
      int a = uniform(-3, 3) * scale, b = uniform(1, 3);
      return parse("[" + std::to_string(a) + " + " + std::to_string(b) + " * i, 0, 0]").child(0);
    };
    if (kind == Op::Scale) return parse("[i + " + std::to_string(uniform(1, 3)) + ", 1, 2]");
    if (kind == Op::Rotate) return mk::vec3(comp(30), mk::num(0), parse("[0, 0, 30 * i]").child(2));
    if (kind == Op::TranslateSpherical) return parse("[" + std::to_string(uniform(1, 3)) + ", 45 * i, 90]");
    return mk::vec3(comp(1), mk::num(uniform(-2, 2)), comp(1));
  }
  Expr cad_body() {
    switch (uniform(0, 2)) {
      case 0: return parse("(Cuboid [i + 1, " + std::to_string(uniform(1, 3)) + ", 1])");
      case 1: return mk::affine(Op::Translate, parse("[2 * i, 0, 1]"), cad());
      default: return parse("(Sphere i+" + std::to_string(uniform(1, 3)) + ")");
    }
  }

  // Integer-valued polynomial vectors.
  std::vector<Vec3d> poly(int n) {
    int c[3][3];
    for (auto& comp : c)
      for (int d = 0; d < 3; ++d) comp[d] = d == 2 && coin() ? 0 : uniform(-5, 5);
    c[0][1] = c[0][1] == 0 ? 1 : c[0][1];
    std::vector<Vec3d> out;
    for (int i = 0; i < n; ++i) {
      Vec3d v;
      for (int k = 0; k < 3; ++k) v[k] = c[k][0] + c[k][1] * i + c[k][2] * i * i;
      out.push_back(v);
    }
    return out;
  }
  Expr vec_list(const std::vector<Vec3d>& vs) {
    std::vector<Expr> xs;
    for (const auto& v : vs) xs.push_back(mk::vec3(v));
    return mk::list(xs);
  }

 private:
  std::mt19937_64 rng_;
  oracle::CoreGen core_;
};

inline bool starts(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

inline Op kind_suffix(const std::string& name) {
  static const std::pair<const char*, Op> table[] = {
      {"-translatespherical", Op::TranslateSpherical}, {"-translate", Op::Translate}, {"-rotate", Op::Rotate},
      {"-scale", Op::Scale}, {"-union", Op::Union}, {"-difference", Op::Difference},
      {"-intersection", Op::Intersection}, {"-cuboid", Op::Cuboid}, {"-sphere", Op::Sphere},
      {"-cylinder", Op::Cylinder}, {"-hexprism", Op::HexPrism}};
  for (auto [suffix, op] : table) {
    std::string s(suffix);
    if (name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) return op;
  }
  return Op::Num;
}

inline Op kind_prefix(const std::string& name) {
  for (Op op : {Op::Rotate, Op::Translate, Op::Scale, Op::Cuboid, Op::Sphere, Op::Cylinder, Op::HexPrism}) {
    std::string n(op_name(op));
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (starts(name, n + "-")) return op;
  }
  return Op::Num;
}

inline Expr unit_of(Op p) {
  if (p == Op::Cuboid) return parse("(Cuboid [1, 1, 1])");
  if (p == Op::Sphere) return parse("(Sphere 1)");
  return mk::primitive(p, mk::vec2(1, 1));
}

// A closed program containing at least one redex of `rule`, or nullopt for an
// unknown rule name.
inline std::optional<Expr> instance_for(const std::string& rule, Gen& g) {
  Op kind = kind_suffix(rule);
  int n = g.uniform(2, 6);
  if (starts(rule, "binop-fold-")) {
    Expr e = g.cad();
    for (int k = 0; k < n; ++k) e = mk::binop(kind, e, g.cad());
    return e;
  }
  if (rule == "repeat") return mk::list(std::vector<Expr>(std::size_t(n), g.cad()));
  if (rule == "structure-finding") {
    Op k = g.affine_kind(false);
    std::vector<Expr> xs;
    Expr shared = g.cad();
    for (int i = 0; i < n; ++i) xs.push_back(mk::affine(k, g.vec(k), g.coin() ? shared : g.cad()));
    return mk::fold(Op::Union, mk::list(xs));
  }
  if (rule == "list-solve") return g.vec_list(g.poly(g.uniform(3, 8)));
  if (rule == "list-solve-sorted") {
    auto vs = g.poly(g.uniform(3, 8));
    std::shuffle(vs.begin(), vs.end(), g.rng());
    return g.vec_list(vs);
  }
  if (rule == "list-solve-spherical") {
    int m = g.uniform(3, 8);
    double r = g.uniform(1, 4), step = 360.0 / m;
    Vec3d c{double(g.uniform(-3, 3)), double(g.uniform(-3, 3)), double(g.uniform(-3, 3))};
    std::vector<Vec3d> vs;
    for (int k = 0; k < m; ++k) vs.push_back(round_sig(Vec3d{c[0] + r * cos_deg(step * k), c[1] + r * sin_deg(step * k), c[2]}));
    if (g.coin()) std::shuffle(vs.begin(), vs.end(), g.rng());
    return g.vec_list(vs);
  }
  if (starts(rule, "repeat-over-map2-"))
    return mk::map2(kind, mk::repeat(n, g.vec(kind)), mk::repeat(n, g.cad()));
  if (starts(rule, "tabulate-over-map2-")) {
    Bindings b{{"i", n}};
    return mk::map2(kind, mk::tabulate(b, g.vec_body(kind)), mk::tabulate(b, g.cad_body()));
  }
  if (starts(rule, "tabulate-repeat-over-map2-")) {
    Bindings b = g.coin() ? Bindings{{"i", n}} : Bindings{{"j", 2}, {"i", n}};
    return mk::map2(kind, mk::tabulate(b, g.vec_body(kind)), mk::repeat(b.size() == 1 ? n : 2 * n, g.cad()));
  }
  if (starts(rule, "repeat-tabulate-over-map2-")) {
    Bindings b = g.coin() ? Bindings{{"i", n}} : Bindings{{"i", n}, {"j", 2}};
    return mk::map2(kind, mk::repeat(b.size() == 1 ? n : 2 * n, g.vec(kind)), mk::tabulate(b, g.cad_body()));
  }
  if (rule == "rotate180-to-scale") return parse("(Rotate [0, 0, 180] " + print(g.cad()) + ")");
  if (rule == "scale-to-rotate180") return parse("(Scale [-1, -1, 1] " + print(g.cad()) + ")");
  if (rule == "rotate-identity-elim") return parse("(Rotate [0, 0, 0] " + print(g.cad()) + ")");
  if (rule == "translate-identity-elim") return parse("(Translate [0, 0, 0] " + print(g.cad()) + ")");
  if (rule == "scale-identity-elim") return parse("(Scale [1, 1, 1] " + print(g.cad()) + ")");
  if (rule.find("-identity-intro") != std::string::npos) return mk::fold(g.binop(), mk::list(g.cads(n)));
  if (rule == "scale-translate-interchange")
    return mk::affine(Op::Scale, g.vec(Op::Scale), mk::affine(Op::Translate, g.vec(Op::Translate), g.cad()));
  if (rule == "translate-scale-interchange")
    return mk::affine(Op::Translate, g.vec(Op::Translate), mk::affine(Op::Scale, g.vec(Op::Scale), g.cad()));
  if (rule == "translate-combine" || rule == "scale-combine") {
    Op k = kind_prefix(rule);
    return mk::affine(k, g.vec(k), mk::affine(k, g.vec(k), g.cad()));
  }
  if (rule.find("-to-unit") != std::string::npos) {
    Op p = kind_prefix(rule);
    Expr prim = g.cad();
    while (prim.op() != p) prim = oracle::CoreGen(g.rng()()).primitive();
    return prim;
  }
  if (starts(rule, "unit-to-")) {
    Op p = kind_suffix(rule);
    double a = g.uniform(1, 4) * (g.coin() ? 1 : -1), b = g.uniform(1, 4), c = g.uniform(1, 4);
    Vec3d s = p == Op::Sphere ? Vec3d{a, a, a} : p == Op::Cuboid ? Vec3d{a, b, c} : Vec3d{b, b, c};
    return mk::affine(Op::Scale, mk::vec3(s), unit_of(p));
  }
  if (rule == "partition") {
    std::vector<Expr> templates{g.cad(), g.cad(), g.cad()};
    std::vector<Expr> xs;
    for (int k = 0; k < n + 1; ++k) {
      Expr t = templates[std::size_t(g.uniform(0, 2))];
      xs.push_back(g.coin() ? mk::affine(Op::Translate, g.vec(Op::Translate), t) : t);
    }
    return mk::fold(Op::Union, mk::list(xs));
  }
  if (starts(rule, "map2-unsort-params-"))
    return mk::map2(kind, mk::unsort(g.perm(n), mk::list(g.vecs(kind, n))), mk::list(g.cads(n)));
  if (starts(rule, "map2-unsort-cads-"))
    return mk::map2(kind, mk::list(g.vecs(kind, n)), mk::unsort(g.perm(n), mk::list(g.cads(n))));
  if (starts(rule, "map2-unpart-params-")) {
    Partitioning p = g.part(n);
    Expr cads = g.coin() ? mk::list(g.cads(n)) : mk::repeat(n, g.cad());
    return mk::map2(kind, mk::unpart(p, g.split(g.vecs(kind, n), p)), cads);
  }
  if (starts(rule, "map2-unpart-cads-")) {
    Partitioning p = g.part(n);
    Expr params = g.coin() ? mk::list(g.vecs(kind, n)) : mk::repeat(n, g.vec(kind));
    return mk::map2(kind, params, mk::unpart(p, g.split(g.cads(n), p)));
  }
  if (rule == "sort-apply") return mk::sort(g.perm(n), mk::list(g.cads(n)));
  if (starts(rule, "unsort-elim-fold-")) return mk::fold(kind, mk::unsort(g.perm(n), mk::list(g.cads(n))));
  if (rule == "unsort-elim-repeat") return mk::unsort(g.perm(n), mk::repeat(n, g.cad()));
  if (rule == "unpart-to-concat") {
    Partitioning p = g.part(n);
    return mk::unpart(p, g.split(g.cads(n), p));
  }
  if (rule == "unspherical-translate") {
    std::vector<Expr> sph;
    for (int k = 0; k < n; ++k) sph.push_back(g.vec(Op::TranslateSpherical));
    return mk::map2(Op::Translate, mk::unspherical(n, g.vec(Op::Translate), mk::list(sph)), mk::list(g.cads(n)));
  }
  if (rule == "unsort-unpart-lift") {
    Partitioning p = g.part(n + 2);
    auto lists = g.split(g.cads(n + 2), p);
    bool any = false;
    for (std::size_t k = 0; k < lists.size(); ++k) {
      if (g.coin() || (!any && k + 1 == lists.size())) {
        lists[k] = mk::unsort(g.perm(int(lists[k].arity())), lists[k]);
        any = true;
      }
    }
    return mk::unpart(p, lists);
  }
  if (starts(rule, "fold-unpart-split-")) {
    Partitioning p = g.part(n);
    return mk::fold(kind, mk::unpart(p, g.split(g.cads(n), p)));
  }
  if (starts(rule, "fold-singleton-")) return mk::fold(kind, mk::list({g.cad()}));
  if (starts(rule, "fold-pair-unfold-")) return mk::fold(kind, mk::list(g.cads(2)));
  if (starts(rule, "fold-flatten-")) {
    auto xs = g.cads(n);
    auto inner = g.cads(g.uniform(1, 3));
    xs.insert(xs.begin() + g.uniform(0, n), mk::fold(kind, mk::list(inner)));
    return mk::fold(kind, mk::list(xs));
  }
  if (rule == "difference-fold-to-union") return mk::fold(Op::Difference, mk::list(g.cads(n + 1)));
  if (starts(rule, "const-fold-")) {
    char sym = rule == "const-fold-add" ? '+' : rule == "const-fold-sub" ? '-' : rule == "const-fold-mul" ? '*' : '/';
    int a = g.uniform(-9, 9), b = g.uniform(1, 9);
    std::string comp = std::to_string(a) + " " + sym + " " + std::to_string(b);
    return parse("(Translate [" + comp + ", 1, 2] " + print(g.cad()) + ")");
  }
  return std::nullopt;
}

inline NodeCostFn unit_cost() {
  return [](const ENode&) -> Cost { return 1; };
}

// Replaces class references with the class's term; the graph holds a single
// program, so each class has exactly one term.
inline Expr materialize(const EGraph& g, const Expr& e) {
  if (e.op() == Op::ClassRef) return extract(g, static_cast<ClassId>(e.count()), unit_cost());
  std::vector<Expr> kids;
  for (const auto& c : e.children()) kids.push_back(materialize(g, c));
  return Expr(e.head(), std::move(kids));
}

inline bool values_equiv(const Value& a, const Value& b, double eps) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Number: return std::abs(a.number - b.number) <= eps;
    case Value::Kind::Vector:
      if (a.dim != b.dim) return false;
      for (int k = 0; k < 3; ++k)
        if (std::abs(a.vec[std::size_t(k)] - b.vec[std::size_t(k)]) > eps) return false;
      return true;
    case Value::Kind::Cad: return semantic_equiv(a.cad, b.cad, eps);
    case Value::Kind::List:
      if (a.items.size() != b.items.size()) return false;
      for (std::size_t k = 0; k < a.items.size(); ++k)
        if (!values_equiv(a.items[k], b.items[k], eps)) return false;
      return true;
  }
  return false;
}

struct Soundness {
  int instances = 0;     // programs on which the rule produced something
  int applications = 0;  // right-hand sides checked
  int failures = 0;
  std::string first_failure;
};

// Applies `rule` at every match in `program` and compares each result with the
// matched term. Returns the number of results checked.
inline int check_instance(const Rewrite& rule, const Expr& program, Soundness& out, double eps = 1e-6) {
  EGraph g;
  g.add_expr(program);
  g.rebuild();
  RuleMemo memo;
  RuleContext ctx(g, 1e-3, memo);
  int checked = 0;
  for (const auto& m : search(g, rule.lhs)) {
    for (const auto& rhs : rule.rhs(ctx, m)) {
      Expr before = extract(g, m.root, unit_cost());
      Expr after = materialize(g, rhs);
      bool ok = false;
      try {
        ok = values_equiv(evaluate(before), evaluate(after), eps);
      } catch (const std::exception& e) {
        ok = false;
      }
      ++checked;
      ++out.applications;
      if (!ok) {
        ++out.failures;
        if (out.first_failure.empty()) out.first_failure = print(before) + "  =>  " + print(after);
      }
    }
  }
  if (checked > 0) ++out.instances;
  return checked;
}

// Draws programs until `want` of them give the rule something to rewrite.
inline Soundness check_rule(const Rewrite& rule, int want, std::uint64_t seed, int max_draws = 5000) {
  Soundness s;
  Gen gen(seed);
  for (int draw = 0; draw < max_draws && s.instances < want; ++draw) {
    auto program = instance_for(rule.name, gen);
    if (!program) break;
    check_instance(rule, *program, s);
  }
  return s;
}

}  // namespace rules_oracle
