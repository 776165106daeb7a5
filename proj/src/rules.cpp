#include "cadshrink/rules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "cadshrink/solvers.hpp"
#include "cadshrink/structure.hpp"
#include "cadshrink/syntax.hpp"

namespace cadshrink {
namespace {

using Exprs = std::vector<Expr>;
using Kind = ClassData::Kind;

constexpr Op kCoreAffines[] = {Op::Translate, Op::Rotate, Op::Scale};
constexpr Op kAllAffines[] = {Op::Translate, Op::Rotate, Op::Scale, Op::TranslateSpherical};
constexpr Op kBinops[] = {Op::Union, Op::Difference, Op::Intersection};
constexpr Op kAcBinops[] = {Op::Union, Op::Intersection};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Rewrite custom(std::string name, std::string group, Pattern lhs, Applier rhs) {
  return Rewrite{std::move(name), std::move(group), std::move(lhs), std::move(rhs)};
}

Pattern pat(std::string_view text) { return Pattern::parse(text); }

Expr ref(ClassId id) { return mk::class_ref(id); }

std::vector<const ENode*> nodes_with(const EGraph& g, ClassId c, Op op) {
  std::vector<const ENode*> out;
  for (const auto& n : g.eclass(c).nodes)
    if (n.op() == op) out.push_back(&n);
  return out;
}

const ENode* first_with(const EGraph& g, ClassId c, Op op) {
  for (const auto& n : g.eclass(c).nodes)
    if (n.op() == op) return &n;
  return nullptr;
}

std::optional<Vec3d> const_vec3(const EGraph& g, ClassId c) {
  const auto& d = g.data(c);
  if (d.dim != 3) return std::nullopt;
  return d.value;
}

bool has_parent_op(const EGraph& g, ClassId c, Op op) {
  for (const auto& [n, p] : g.eclass(c).parents)
    if (n.op() == op) return true;
  return false;
}

bool has_list_parent(const EGraph& g, ClassId c) { return has_parent_op(g, c, Op::List); }

std::string node_key(const std::string& rule, const EGraph& g, const ENode& n) {
  return rule + "|" + describe(g.canonicalize(n));
}

// ---------------------------------------------------------------- reroll

Rewrite binop_fold(Op kind) {
  Pattern lhs = Pattern::from_expr(mk::binop(kind, mk::var("?a"), mk::var("?b")));
  return custom("binop-fold-" + lower(op_name(kind)), "reroll", lhs, [kind](RuleContext& ctx, const Match& m) -> Exprs {
    const EGraph& g = ctx.graph;
    // Only the outermost node of a same-kind left spine.
    for (const auto& [n, parent] : g.eclass(m.root).parents)
      if (n.op() == kind && g.find(n.children[0]) == m.root) return {};
    std::vector<ClassId> items{m.subst["?b"]};
    std::set<ClassId> seen{m.root};
    ClassId cur = m.subst["?a"];
    while (true) {
      const ENode* next = seen.count(cur) ? nullptr : first_with(g, cur, kind);
      if (!next) {
        items.push_back(cur);
        break;
      }
      seen.insert(cur);
      items.push_back(g.find(next->children[1]));
      cur = g.find(next->children[0]);
    }
    std::reverse(items.begin(), items.end());
    Exprs list;
    for (ClassId c : items) list.push_back(ref(c));
    return {mk::fold(kind, mk::list(std::move(list)))};
  });
}

Pattern any_list() { return Pattern::from_expr(mk::list({mk::var("?xs...")})); }

Rewrite repeat_rule() {
  return custom("repeat", "reroll", any_list(), [](RuleContext&, const Match& m) -> Exprs {
    const auto& xs = m.subst.rest("?xs");
    if (xs.size() < 2) return {};
    if (!std::all_of(xs.begin(), xs.end(), [&](ClassId c) { return c == xs.front(); })) return {};
    return {mk::repeat(static_cast<int>(xs.size()), ref(xs.front()))};
  });
}

bool all_kind(const EGraph& g, const std::vector<ClassId>& xs, Kind k) {
  return std::all_of(xs.begin(), xs.end(), [&](ClassId c) { return g.data(c).kind == k; });
}

Rewrite structure_finding() {
  return custom("structure-finding", "reroll", any_list(), [](RuleContext& ctx, const Match& m) -> Exprs {
    const auto& xs = m.subst.rest("?xs");
    if (xs.size() < 2 || !all_kind(ctx.graph, xs, Kind::Cad)) return {};
    // Candidates only change when some item gains or loses affine nodes;
    // anything emitted earlier is still in the graph.
    std::string key = node_key("structure-finding", ctx.graph, m.node);
    for (ClassId c : xs) {
      auto sig = affine_signature(ctx.graph, c);
      key += "|" + std::to_string(sig.counts[0]) + "," + std::to_string(sig.counts[1]) + "," + std::to_string(sig.counts[2]);
    }
    if (ctx.memo.get(key)) return {};
    ctx.memo.put(key, {});
    // A Map2 built only from identities looping on their own classes is the
    // list itself; adding it just feeds the Map2 rules more work.
    Exprs out;
    for (auto& e : find_map2s(ctx.graph, xs)) {
      const auto& cads = e.child(1).children();
      bool moves = false;
      for (std::size_t i = 0; i < xs.size() && !moves; ++i)
        moves = ctx.graph.find(static_cast<ClassId>(cads[i].count())) != ctx.graph.find(xs[i]);
      if (moves) out.push_back(std::move(e));
    }
    return out;
  });
}

std::optional<std::vector<Vec3d>> constant_vectors(const EGraph& g, const std::vector<ClassId>& xs) {
  std::vector<Vec3d> vs;
  for (ClassId c : xs) {
    auto v = const_vec3(g, c);
    if (!v) return std::nullopt;
    vs.push_back(*v);
  }
  return vs;
}

enum class SolveMode { Plain, Sorted, Spherical };

struct SolveAttempts {
  std::optional<Expr> plain;
  std::optional<SortedSolution> sorted;
  std::optional<Expr> spherical;
};

Exprs solve_vectors(RuleContext& ctx, const std::string& list_key, const std::vector<Vec3d>& vs, SolveMode mode) {
  // One entry per list holds every attempt; later modes only run when earlier ones failed.
  std::string key = "solve|" + list_key;
  Exprs cached = ctx.memo.get(key).value_or(Exprs{});
  if (cached.empty()) {
    SolveAttempts a;
    a.plain = solve_list(vs, ctx.solver_eps);
    if (!a.plain) a.sorted = solve_list_sorted(vs, ctx.solver_eps);
    if (!a.plain && !a.sorted) a.spherical = solve_spherical(vs, ctx.solver_eps);
    Expr none = mk::list({mk::num(0)});
    cached = {a.plain.value_or(none), a.sorted ? mk::unsort(a.sorted->perm, a.sorted->tabulate) : none,
              a.spherical.value_or(none)};
    cached.push_back(mk::num(a.plain ? 0 : a.sorted ? 1 : a.spherical ? 2 : 3));
    ctx.memo.put(key, cached);
  }
  int which = static_cast<int>(cached[3].num());
  if (which != static_cast<int>(mode)) return {};
  return {cached[static_cast<std::size_t>(which)]};
}

Rewrite list_solve(std::string name, std::string group, SolveMode mode) {
  return custom(name, group, any_list(), [mode](RuleContext& ctx, const Match& m) -> Exprs {
    const auto& xs = m.subst.rest("?xs");
    if (xs.size() < 3) return {};
    auto vs = constant_vectors(ctx.graph, xs);
    if (!vs) return {};
    // Constant lists are left to the Repeat rule.
    if (std::all_of(vs->begin(), vs->end(), [&](const Vec3d& v) { return v == vs->front(); })) return {};
    return solve_vectors(ctx, node_key("list", ctx.graph, m.node), *vs, mode);
  });
}

int bound_product(const Bindings& bs) {
  int p = 1;
  for (const auto& b : bs) p *= b.bound;
  return p;
}

enum class Recombine { RepeatRepeat, TabTab, TabRepeat, RepeatTab };

Rewrite recombine(Op kind, Recombine variant) {
  static const char* names[] = {"repeat-over-map2", "tabulate-over-map2", "tabulate-repeat-over-map2",
                                "repeat-tabulate-over-map2"};
  std::string name = std::string(names[static_cast<int>(variant)]) + "-" + lower(op_name(kind));
  Pattern lhs = Pattern::from_expr(mk::map2(kind, mk::var("?ps"), mk::var("?cs")));
  return custom(name, "reroll", lhs, [kind, variant](RuleContext& ctx, const Match& m) -> Exprs {
    const EGraph& g = ctx.graph;
    ClassId ps = m.subst["?ps"], cs = m.subst["?cs"];
    Exprs out;
    auto body = [&](const ENode* p, const ENode* c) { return mk::affine(kind, ref(p->children[0]), ref(c->children[0])); };
    switch (variant) {
      case Recombine::RepeatRepeat:
        for (const ENode* p : nodes_with(g, ps, Op::Repeat))
          for (const ENode* c : nodes_with(g, cs, Op::Repeat))
            if (std::get<int>(p->head.payload) == std::get<int>(c->head.payload))
              out.push_back(mk::repeat(std::get<int>(p->head.payload), body(p, c)));
        break;
      case Recombine::TabTab:
        for (const ENode* p : nodes_with(g, ps, Op::Tabulate))
          for (const ENode* c : nodes_with(g, cs, Op::Tabulate))
            if (p->head.payload == c->head.payload)
              out.push_back(mk::tabulate(std::get<Bindings>(p->head.payload), body(p, c)));
        break;
      case Recombine::TabRepeat:
        for (const ENode* p : nodes_with(g, ps, Op::Tabulate))
          for (const ENode* c : nodes_with(g, cs, Op::Repeat)) {
            const auto& bs = std::get<Bindings>(p->head.payload);
            if (bound_product(bs) == std::get<int>(c->head.payload)) out.push_back(mk::tabulate(bs, body(p, c)));
          }
        break;
      case Recombine::RepeatTab:
        for (const ENode* p : nodes_with(g, ps, Op::Repeat))
          for (const ENode* c : nodes_with(g, cs, Op::Tabulate)) {
            const auto& bs = std::get<Bindings>(c->head.payload);
            if (bound_product(bs) == std::get<int>(p->head.payload)) out.push_back(mk::tabulate(bs, body(p, c)));
          }
        break;
    }
    return out;
  });
}

// ---------------------------------------------------------------- CAD identities

Rewrite identity_intro(Op kind, Vec3d identity) {
  std::string name = lower(op_name(kind)) + "-identity-intro";
  return custom(name, "cad_identities", Pattern::var_of("?c"), [kind, identity](RuleContext& ctx, const Match& m) -> Exprs {
    const EGraph& g = ctx.graph;
    if (g.data(m.root).kind != Kind::Cad || !has_list_parent(g, m.root)) return {};
    return {mk::affine(kind, mk::vec3(identity), ref(m.root))};
  });
}

Exprs interchange_st(RuleContext& ctx, const Match& m) {
  auto s = const_vec3(ctx.graph, m.subst["?s"]);
  auto t = const_vec3(ctx.graph, m.subst["?t"]);
  if (!s || !t) return {};
  Vec3d p{(*s)[0] * (*t)[0], (*s)[1] * (*t)[1], (*s)[2] * (*t)[2]};
  return {mk::affine(Op::Translate, mk::vec3(round_sig(p)), mk::affine(Op::Scale, ref(m.subst["?s"]), ref(m.subst["?c"])))};
}

Exprs interchange_ts(RuleContext& ctx, const Match& m) {
  auto s = const_vec3(ctx.graph, m.subst["?s"]);
  auto t = const_vec3(ctx.graph, m.subst["?t"]);
  if (!s || !t) return {};
  for (double x : *s)
    if (x == 0.0) return {};
  Vec3d p{(*t)[0] / (*s)[0], (*t)[1] / (*s)[1], (*t)[2] / (*s)[2]};
  return {mk::affine(Op::Scale, ref(m.subst["?s"]), mk::affine(Op::Translate, mk::vec3(round_sig(p)), ref(m.subst["?c"])))};
}

Rewrite combine(Op kind) {
  Pattern lhs = Pattern::from_expr(mk::affine(kind, mk::var("?a"), mk::affine(kind, mk::var("?b"), mk::var("?c"))));
  return custom(lower(op_name(kind)) + "-combine", "cad_identities", lhs, [kind](RuleContext& ctx, const Match& m) -> Exprs {
    auto a = const_vec3(ctx.graph, m.subst["?a"]);
    auto b = const_vec3(ctx.graph, m.subst["?b"]);
    if (!a || !b) return {};
    Vec3d p;
    for (int k = 0; k < 3; ++k) p[k] = kind == Op::Scale ? (*a)[k] * (*b)[k] : (*a)[k] + (*b)[k];
    return {mk::affine(kind, mk::vec3(round_sig(p)), ref(m.subst["?c"]))};
  });
}

Expr unit_primitive(Op op) {
  if (op == Op::Cuboid) return mk::cuboid(mk::vec3(Vec3d{1, 1, 1}));
  if (op == Op::Sphere) return mk::sphere(mk::num(1));
  return mk::primitive(op, mk::vec2(1, 1));
}

// Scale that turns the unit primitive into (op params), if params are constant.
std::optional<Vec3d> primitive_scale(const EGraph& g, Op op, ClassId params) {
  const auto& d = g.data(params);
  if (op == Op::Cuboid && d.dim == 3) return d.value;
  if (op == Op::Sphere && d.dim == 1) return Vec3d{d.value[0], d.value[0], d.value[0]};
  if ((op == Op::Cylinder || op == Op::HexPrism) && d.dim == 2) return Vec3d{d.value[1], d.value[1], d.value[0]};
  return std::nullopt;
}

Rewrite primitive_to_unit(Op op) {
  Pattern lhs = Pattern::from_expr(mk::primitive(op, mk::var("?p")));
  return custom(lower(op_name(op)) + "-to-unit", "cad_identities", lhs, [op](RuleContext& ctx, const Match& m) -> Exprs {
    auto s = primitive_scale(ctx.graph, op, m.subst["?p"]);
    if (!s || *s == Vec3d{1, 1, 1}) return {};
    return {mk::affine(Op::Scale, mk::vec3(*s), unit_primitive(op))};
  });
}

Rewrite unit_to_primitive(Op op) {
  Pattern lhs = Pattern::from_expr(mk::affine(Op::Scale, mk::var("?s"), unit_primitive(op)));
  return custom("unit-to-" + lower(op_name(op)), "cad_identities", lhs, [op](RuleContext& ctx, const Match& m) -> Exprs {
    auto s = const_vec3(ctx.graph, m.subst["?s"]);
    if (!s) return {};
    const Vec3d& v = *s;
    if (op == Op::Cuboid) return {mk::cuboid(mk::vec3(v))};
    if (op == Op::Sphere) {
      if (v[0] != v[1] || v[1] != v[2]) return {};
      return {mk::sphere(mk::num(v[0]))};
    }
    if (v[0] != v[1]) return {};
    return {mk::primitive(op, mk::vec2(v[2], v[0]))};
  });
}

// ---------------------------------------------------------------- inverse

// Per item, the primitives in its cheapest representative: once by kind alone
// and once by kind and class.
std::pair<std::vector<std::string>, std::vector<std::string>> primitive_keys(RuleContext& ctx,
                                                                             const std::vector<ClassId>& items) {
  const EGraph& g = ctx.graph;
  const Extractor& ex = ctx.costs();
  using Leaves = std::set<std::pair<Op, ClassId>>;
  std::map<ClassId, Leaves> memo;
  std::function<Leaves(ClassId)> prims = [&](ClassId c) -> Leaves {
    c = g.find(c);
    if (auto it = memo.find(c); it != memo.end()) return it->second;
    memo[c] = {};  // guards against cycles through unextractable classes
    Leaves out;
    if (const ENode* n = ex.best(c)) {
      if (is_primitive(n->op())) out.insert({n->op(), c});
      for (ClassId ch : n->children) {
        Leaves sub = prims(ch);
        out.insert(sub.begin(), sub.end());
      }
    }
    return memo[c] = out;
  };
  std::vector<std::string> kinds, leaves;
  for (ClassId c : items) {
    std::set<Op> ops;
    std::string l;
    for (auto [op, cls] : prims(c)) {
      ops.insert(op);
      l += std::string(op_name(op)) + "#" + std::to_string(cls) + ",";
    }
    std::string k;
    for (Op op : ops) k += std::string(op_name(op)) + ",";
    kinds.push_back(k);
    leaves.push_back(l);
  }
  return {kinds, leaves};
}

}  // namespace

std::vector<std::vector<std::string>> partition_keys(RuleContext& ctx, const std::vector<ClassId>& items) {
  const EGraph& g = ctx.graph;
  const Extractor& ex = ctx.costs();
  std::vector<std::vector<std::string>> menu;
  auto [kinds, leaves] = primitive_keys(ctx, items);
  menu.push_back(std::move(kinds));
  menu.push_back(std::move(leaves));

  // Shape of the affine wrapper chain in the cheapest representative.
  std::vector<std::string> chain;
  for (ClassId c : items) {
    std::string k;
    std::set<ClassId> seen;
    const ENode* n = ex.best(c);
    while (n && is_affine(n->op()) && seen.insert(g.find(c)).second) {
      k += std::string(op_name(n->op())) + ">";
      c = g.find(n->children[1]);
      n = ex.best(c);
    }
    chain.push_back(k);
  }
  menu.push_back(std::move(chain));

  std::vector<std::string> cls;
  for (ClassId c : items) cls.push_back(std::to_string(g.find(c)));
  menu.push_back(std::move(cls));

  for (Op kind : kCoreAffines) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<std::string> comp;
      for (ClassId c : items) {
        const ENode* n = ex.best(c);
        std::optional<Vec3d> v;
        if (n && n->op() == kind) v = const_vec3(g, n->children[0]);
        comp.push_back(v ? format_number((*v)[axis]) : std::string("-"));
      }
      menu.push_back(std::move(comp));
    }
  }
  return menu;
}

std::vector<Expr> partition_list(RuleContext& ctx, const std::vector<ClassId>& items) {
  if (items.size() < 2) return {};
  for (const auto& keys : partition_keys(ctx, items)) {
    auto grouping = group_by_keys(keys);
    if (!grouping) continue;
    std::vector<Expr> lists;
    for (const auto& grp : grouping->groups) {
      std::vector<Expr> xs;
      for (std::size_t i : grp) xs.push_back(mk::class_ref(items[i]));
      lists.push_back(mk::list(std::move(xs)));
    }
    Expr un = mk::unpart(grouping->part, std::move(lists));
    if (grouping->contiguous) return {un};
    return {mk::unsort(grouping->order, un)};
  }
  return {};
}

Permutation embed_permutations(const Partitioning& part, const std::vector<std::optional<Permutation>>& perms) {
  Permutation out;
  int offset = 0;
  for (std::size_t i = 0; i < part.lengths.size(); ++i) {
    int len = part.lengths[i];
    for (int k = 0; k < len; ++k) {
      int local = (i < perms.size() && perms[i]) ? perms[i]->indices[static_cast<std::size_t>(k)] : k;
      out.indices.push_back(offset + local);
    }
    offset += len;
  }
  return out;
}

namespace {

Rewrite partition_rule() {
  return custom("partition", "inverse", any_list(), [](RuleContext& ctx, const Match& m) -> Exprs {
    const auto& xs = m.subst.rest("?xs");
    if (xs.size() < 2 || !all_kind(ctx.graph, xs, Kind::Cad)) return {};
    // Only folded lists; splitting the operands of a Map2 just multiplies candidates.
    if (!has_parent_op(ctx.graph, m.root, Op::Fold)) return {};
    std::string key = node_key("partition", ctx.graph, m.node);
    if (auto hit = ctx.memo.get(key)) return *hit;
    Exprs out = partition_list(ctx, xs);
    ctx.memo.put(key, out);
    return out;
  });
}

Rewrite map2_unsort(Op kind, bool params) {
  std::string name = std::string(params ? "map2-unsort-params-" : "map2-unsort-cads-") + lower(op_name(kind));
  Pattern lhs = Pattern::from_expr(mk::map2(kind, mk::var("?ps"), mk::var("?cs")));
  return custom(name, "inverse", lhs, [params](RuleContext& ctx, const Match& m) -> Exprs {
    Exprs out;
    for (const ENode* u : nodes_with(ctx.graph, m.subst[params ? "?ps" : "?cs"], Op::Unsort)) {
      const auto& p = std::get<Permutation>(u->head.payload);
      out.push_back(mk::unsort(p, mk::sort(p, ref(m.root))));
    }
    return out;
  });
}

Rewrite sort_apply() {
  Pattern lhs = Pattern::any(Op::Sort, {Pattern::var_of("?l")});
  return custom("sort-apply", "inverse", lhs, [](RuleContext& ctx, const Match& m) -> Exprs {
    const auto& p = std::get<Permutation>(m.node.head.payload);
    Exprs out;
    for (const ENode* l : nodes_with(ctx.graph, m.subst["?l"], Op::List)) {
      if (l->children.size() != p.size()) continue;
      std::vector<Expr> xs;
      for (int i : p.indices) xs.push_back(ref(l->children[static_cast<std::size_t>(i)]));
      out.push_back(mk::list(std::move(xs)));
    }
    return out;
  });
}

Rewrite unsort_elim_fold(Op kind) {
  Pattern lhs = Pattern::from_expr(mk::fold(kind, mk::var("?l")));
  return custom("unsort-elim-fold-" + lower(op_name(kind)), "inverse", lhs, [kind](RuleContext& ctx, const Match& m) -> Exprs {
    Exprs out;
    for (const ENode* u : nodes_with(ctx.graph, m.subst["?l"], Op::Unsort)) out.push_back(mk::fold(kind, ref(u->children[0])));
    return out;
  });
}

Rewrite unsort_elim_repeat() {
  Pattern lhs = Pattern::any(Op::Unsort, {Pattern::var_of("?l")});
  return custom("unsort-elim-repeat", "inverse", lhs, [](RuleContext& ctx, const Match& m) -> Exprs {
    if (!first_with(ctx.graph, m.subst["?l"], Op::Repeat)) return {};
    return {ref(m.subst["?l"])};
  });
}

// Splits a list class into slices matching `part`, from a List or Repeat node.
std::optional<std::vector<Expr>> slices(const EGraph& g, ClassId c, const Partitioning& part) {
  if (const ENode* l = first_with(g, c, Op::List); l && l->children.size() == part.total()) {
    std::vector<Expr> out;
    std::size_t at = 0;
    for (int len : part.lengths) {
      std::vector<Expr> xs;
      for (int k = 0; k < len; ++k) xs.push_back(ref(l->children[at++]));
      out.push_back(mk::list(std::move(xs)));
    }
    return out;
  }
  for (const ENode* r : nodes_with(g, c, Op::Repeat)) {
    if (static_cast<std::size_t>(std::get<int>(r->head.payload)) != part.total()) continue;
    std::vector<Expr> out;
    for (int len : part.lengths) out.push_back(mk::repeat(len, ref(r->children[0])));
    return out;
  }
  return std::nullopt;
}

Rewrite map2_unpart(Op kind, bool params) {
  std::string name = std::string(params ? "map2-unpart-params-" : "map2-unpart-cads-") + lower(op_name(kind));
  Pattern lhs = Pattern::from_expr(mk::map2(kind, mk::var("?ps"), mk::var("?cs")));
  return custom(name, "inverse", lhs, [kind, params](RuleContext& ctx, const Match& m) -> Exprs {
    const EGraph& g = ctx.graph;
    ClassId split = m.subst[params ? "?ps" : "?cs"];
    ClassId other = m.subst[params ? "?cs" : "?ps"];
    Exprs out;
    for (const ENode* u : nodes_with(g, split, Op::Unpart)) {
      const auto& part = std::get<Partitioning>(u->head.payload);
      if (u->children.size() != part.lengths.size()) continue;
      auto pieces = slices(g, other, part);
      if (!pieces) continue;
      std::vector<Expr> maps;
      for (std::size_t i = 0; i < u->children.size(); ++i) {
        Expr mine = ref(u->children[i]);
        maps.push_back(params ? mk::map2(kind, mine, (*pieces)[i]) : mk::map2(kind, (*pieces)[i], mine));
      }
      out.push_back(mk::unpart(part, std::move(maps)));
    }
    return out;
  });
}

Rewrite unpart_to_concat() {
  Pattern lhs = Pattern::any(Op::Unpart, {Pattern::rest_of("?xs")});
  return custom("unpart-to-concat", "inverse", lhs, [](RuleContext&, const Match& m) -> Exprs {
    std::vector<Expr> xs;
    for (ClassId c : m.subst.rest("?xs")) xs.push_back(ref(c));
    return {mk::concat(std::move(xs))};
  });
}

Rewrite unspherical_translate() {
  Pattern lhs = Pattern::from_expr(mk::map2(Op::Translate, mk::var("?ps"), mk::var("?cs")));
  return custom("unspherical-translate", "inverse", lhs, [](RuleContext& ctx, const Match& m) -> Exprs {
    Exprs out;
    for (const ENode* u : nodes_with(ctx.graph, m.subst["?ps"], Op::Unspherical)) {
      int n = std::get<int>(u->head.payload);
      out.push_back(mk::map2(Op::Translate, mk::repeat(n, ref(u->children[0])),
                             mk::map2(Op::TranslateSpherical, ref(u->children[1]), ref(m.subst["?cs"]))));
    }
    return out;
  });
}

// ---------------------------------------------------------------- bridge

Rewrite unsort_unpart_lift() {
  Pattern lhs = Pattern::any(Op::Unpart, {Pattern::rest_of("?xs")});
  return custom("unsort-unpart-lift", "bridge", lhs, [](RuleContext& ctx, const Match& m) -> Exprs {
    const auto& part = std::get<Partitioning>(m.node.head.payload);
    const auto& xs = m.subst.rest("?xs");
    if (xs.size() != part.lengths.size()) return {};
    std::vector<std::optional<Permutation>> perms(xs.size());
    std::vector<Expr> inner;
    bool any = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const ENode* u = nullptr;
      for (const ENode* cand : nodes_with(ctx.graph, xs[i], Op::Unsort)) {
        if (std::get<Permutation>(cand->head.payload).size() == static_cast<std::size_t>(part.lengths[i])) {
          u = cand;
          break;
        }
      }
      if (u) {
        perms[i] = std::get<Permutation>(u->head.payload);
        inner.push_back(ref(u->children[0]));
        any = true;
      } else {
        inner.push_back(ref(xs[i]));
      }
    }
    if (!any) return {};
    return {mk::unsort(embed_permutations(part, perms), mk::unpart(part, std::move(inner)))};
  });
}

Rewrite fold_unpart_split(Op kind) {
  Pattern lhs = Pattern::from_expr(mk::fold(kind, mk::var("?l")));
  return custom("fold-unpart-split-" + lower(op_name(kind)), "bridge", lhs, [kind](RuleContext& ctx, const Match& m) -> Exprs {
    Exprs out;
    for (const ENode* u : nodes_with(ctx.graph, m.subst["?l"], Op::Unpart)) {
      std::vector<Expr> folds;
      for (ClassId c : u->children) folds.push_back(mk::fold(kind, ref(c)));
      out.push_back(mk::fold(kind, mk::list(std::move(folds))));
    }
    return out;
  });
}

Rewrite fold_singleton(Op kind) {
  return make_rewrite("fold-singleton-" + lower(op_name(kind)), "bridge",
                      "(Fold " + std::string(op_name(kind)) + " (List ?x))", "?x");
}

Rewrite fold_pair(Op kind) {
  std::string k(op_name(kind));
  return make_rewrite("fold-pair-unfold-" + lower(k), "bridge", "(Fold " + k + " (List ?a ?b))", "(" + k + " ?a ?b)");
}

Rewrite fold_flatten(Op kind) {
  Pattern lhs = Pattern::from_expr(mk::fold(kind, mk::var("?l")));
  return custom("fold-flatten-" + lower(op_name(kind)), "bridge", lhs, [kind](RuleContext& ctx, const Match& m) -> Exprs {
    const EGraph& g = ctx.graph;
    Exprs out;
    for (const ENode* l : nodes_with(g, m.subst["?l"], Op::List)) {
      std::vector<Expr> xs;
      bool spliced = false;
      for (ClassId c : l->children) {
        const ENode* inner = nullptr;
        if (g.find(c) != m.root) {
          for (const ENode* f : nodes_with(g, c, Op::Fold)) {
            if (std::get<Op>(f->head.payload) != kind) continue;
            if (const ENode* il = first_with(g, f->children[0], Op::List)) {
              inner = il;
              break;
            }
          }
        }
        if (inner) {
          for (ClassId ic : inner->children) xs.push_back(ref(ic));
          spliced = true;
        } else {
          xs.push_back(ref(c));
        }
      }
      if (spliced) out.push_back(mk::fold(kind, mk::list(std::move(xs))));
    }
    return out;
  });
}

Rewrite difference_fold() {
  return custom("difference-fold-to-union", "bridge", Pattern::from_expr(mk::fold(Op::Difference, mk::var("?l"))),
                [](RuleContext& ctx, const Match& m) -> Exprs {
                  Exprs out;
                  for (const ENode* l : nodes_with(ctx.graph, m.subst["?l"], Op::List)) {
                    if (l->children.size() < 3) continue;
                    std::vector<Expr> rest;
                    for (std::size_t i = 1; i < l->children.size(); ++i) rest.push_back(ref(l->children[i]));
                    out.push_back(mk::binop(Op::Difference, ref(l->children[0]), mk::fold(Op::Union, mk::list(std::move(rest)))));
                  }
                  return out;
                });
}

// ---------------------------------------------------------------- numeric

Rewrite const_fold(Op op) {
  Pattern lhs = Pattern::from_expr(mk::arith(op, mk::var("?a"), mk::var("?b")));
  return custom(std::string("const-fold-") + (op == Op::Add ? "add" : op == Op::Sub ? "sub" : op == Op::Mul ? "mul" : "div"),
                "numeric", lhs, [](RuleContext& ctx, const Match& m) -> Exprs {
                  const auto& d = ctx.graph.data(m.root);
                  if (d.dim != 1) return {};
                  return {mk::num(d.value[0])};
                });
}

}  // namespace

std::vector<Rewrite> reroll_rules() {
  std::vector<Rewrite> rs;
  for (Op k : kBinops) rs.push_back(binop_fold(k));
  rs.push_back(repeat_rule());
  rs.push_back(structure_finding());
  rs.push_back(list_solve("list-solve", "reroll", SolveMode::Plain));
  for (Op k : kAllAffines)
    for (auto v : {Recombine::RepeatRepeat, Recombine::TabTab, Recombine::TabRepeat, Recombine::RepeatTab})
      rs.push_back(recombine(k, v));
  return rs;
}

std::vector<Rewrite> cad_identity_rules() {
  std::vector<Rewrite> rs;
  rs.push_back(make_rewrite("rotate180-to-scale", "cad_identities", "(Rotate [0, 0, 180] ?c)", "(Scale [-1, -1, 1] ?c)"));
  rs.push_back(make_rewrite("scale-to-rotate180", "cad_identities", "(Scale [-1, -1, 1] ?c)", "(Rotate [0, 0, 180] ?c)"));
  rs.push_back(make_rewrite("rotate-identity-elim", "cad_identities", "(Rotate [0, 0, 0] ?c)", "?c"));
  rs.push_back(make_rewrite("translate-identity-elim", "cad_identities", "(Translate [0, 0, 0] ?c)", "?c"));
  rs.push_back(make_rewrite("scale-identity-elim", "cad_identities", "(Scale [1, 1, 1] ?c)", "?c"));
  rs.push_back(identity_intro(Op::Rotate, {0, 0, 0}));
  rs.push_back(identity_intro(Op::Translate, {0, 0, 0}));
  rs.push_back(identity_intro(Op::Scale, {1, 1, 1}));
  rs.push_back(custom("scale-translate-interchange", "cad_identities", pat("(Scale ?s (Translate ?t ?c))"), interchange_st));
  rs.push_back(custom("translate-scale-interchange", "cad_identities", pat("(Translate ?t (Scale ?s ?c))"), interchange_ts));
  rs.push_back(combine(Op::Scale));
  rs.push_back(combine(Op::Translate));
  for (Op p : {Op::Cuboid, Op::Sphere, Op::Cylinder, Op::HexPrism}) {
    rs.push_back(primitive_to_unit(p));
    rs.push_back(unit_to_primitive(p));
  }
  return rs;
}

std::vector<Rewrite> inverse_rules() {
  std::vector<Rewrite> rs;
  rs.push_back(list_solve("list-solve-sorted", "inverse", SolveMode::Sorted));
  rs.push_back(list_solve("list-solve-spherical", "inverse", SolveMode::Spherical));
  rs.push_back(partition_rule());
  for (Op k : kAllAffines) {
    rs.push_back(map2_unsort(k, true));
    rs.push_back(map2_unsort(k, false));
    rs.push_back(map2_unpart(k, true));
    rs.push_back(map2_unpart(k, false));
  }
  rs.push_back(sort_apply());
  for (Op k : kAcBinops) rs.push_back(unsort_elim_fold(k));
  rs.push_back(unsort_elim_repeat());
  rs.push_back(unpart_to_concat());
  rs.push_back(unspherical_translate());
  return rs;
}

std::vector<Rewrite> bridge_rules() {
  std::vector<Rewrite> rs;
  rs.push_back(unsort_unpart_lift());
  for (Op k : kAcBinops) rs.push_back(fold_unpart_split(k));
  for (Op k : kBinops) rs.push_back(fold_singleton(k));
  for (Op k : kAcBinops) rs.push_back(fold_flatten(k));
  for (Op k : kBinops) rs.push_back(fold_pair(k));
  rs.push_back(difference_fold());
  return rs;
}

std::vector<Rewrite> numeric_rules() {
  std::vector<Rewrite> rs;
  for (Op op : {Op::Add, Op::Sub, Op::Mul, Op::Div}) rs.push_back(const_fold(op));
  return rs;
}

std::vector<Rewrite> all_rules(const RuleGroups& groups) {
  std::vector<Rewrite> rs;
  auto take = [&](std::vector<Rewrite> more) {
    for (auto& r : more) rs.push_back(std::move(r));
  };
  if (groups.reroll) take(reroll_rules());
  if (groups.cad_identities) take(cad_identity_rules());
  if (groups.inverse) take(inverse_rules());
  if (groups.bridge) take(bridge_rules());
  if (groups.numeric) take(numeric_rules());
  return rs;
}

}  // namespace cadshrink
