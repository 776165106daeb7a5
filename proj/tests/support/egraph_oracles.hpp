// Brute-force references for the e-graph: congruence closure recomputed from
// scratch and exhaustive extraction.
#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cadshrink/cost.hpp"
#include "cadshrink/egraph.hpp"
#include "cadshrink/extract.hpp"
#include "cadshrink/syntax.hpp"

namespace egraph_oracle {

using namespace cadshrink;


inline ENode leaf(const std::string& name) { return ENode{Head{Op::Var, name}, {}}; }
inline ENode node(Op op, std::vector<ClassId> kids) { return ENode{Head{op, {}}, std::move(kids)}; }

// Terms as added, with their original child ids.
struct Recorded {
  Head head;
  std::vector<ClassId> kids;
  ClassId id;
};

// Plain union-find for the oracle.
struct Naive {
  std::vector<int> up;
  explicit Naive(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) { return up[x] == x ? x : up[x] = find(up[x]); }
  bool join(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    up[a] = b;
    return true;
  }
};

struct RandomGraph {
  EGraph g;
  std::vector<Recorded> terms;
  std::vector<std::pair<ClassId, ClassId>> merges;
};

inline RandomGraph random_graph(std::mt19937_64& rng, int max_nodes, int n_merges) {
  RandomGraph r;
  auto pick = [&](int n) { return int(rng() % std::uint64_t(n)); };
  int leaves = 2 + pick(4);
  for (int k = 0; k < leaves; ++k) {
    ENode n = leaf(std::string(1, char('a' + k)));
    r.terms.push_back({n.head, {}, r.g.add(n)});
  }
  static const Op ops[] = {Op::Sphere, Op::Union, Op::Difference, Op::List};
  while (int(r.terms.size()) < max_nodes) {
    Op op = ops[pick(4)];
    int arity = op == Op::Sphere ? 1 : op == Op::List ? 1 + pick(3) : 2;
    std::vector<ClassId> kids;
    for (int k = 0; k < arity; ++k) kids.push_back(r.terms[pick(int(r.terms.size()))].id);
    ENode n = node(op, kids);
    r.terms.push_back({n.head, kids, r.g.add(n)});
  }
  for (int k = 0; k < n_merges; ++k) {
    ClassId a = r.terms[pick(int(r.terms.size()))].id, b = r.terms[pick(int(r.terms.size()))].id;
    r.merges.push_back({a, b});
    r.g.merge(a, b);
    if (pick(3) == 0) r.g.rebuild();
  }
  r.g.rebuild();
  return r;
}

// Congruence closure from scratch over the recorded terms.
inline Naive naive_closure(const RandomGraph& r) {
  int n = int(r.terms.size());
  // Terms are identified by the id their insertion returned; map ids to a term.
  std::map<ClassId, int> owner;
  for (int i = 0; i < n; ++i) owner.emplace(r.terms[i].id, i);
  Naive uf(n);
  for (int i = 0; i < n; ++i) uf.join(i, owner.at(r.terms[i].id));
  for (auto [a, b] : r.merges) uf.join(owner.at(a), owner.at(b));
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto& x = r.terms[i];
        const auto& y = r.terms[j];
        if (!(x.head == y.head) || x.kids.size() != y.kids.size() || uf.find(i) == uf.find(j)) continue;
        bool same = true;
        for (std::size_t k = 0; k < x.kids.size() && same; ++k)
          same = uf.find(owner.at(x.kids[k])) == uf.find(owner.at(y.kids[k]));
        if (same) changed |= uf.join(i, j);
      }
  }
  return uf;
}

// Least cost over terms that never revisit a class on a root-to-leaf path.
// Any cheaper term with a repeat could drop the outer occurrence, so this is
// the true optimum.
inline Cost brute_cost(const EGraph& g, ClassId c, std::uint64_t path, std::map<std::pair<ClassId, std::uint64_t>, Cost>& memo,
                const std::map<ClassId, int>& bit) {
  c = g.find(c);
  auto key = std::make_pair(c, path);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t here = path | (1ull << bit.at(c));
  Cost best = kInfiniteCost;
  for (const auto& n : g.eclass(c).nodes) {
    Cost total = node_cost(n.op());
    for (ClassId k : n.children) {
      if (here & (1ull << bit.at(g.find(k)))) {
        total = kInfiniteCost;
        break;
      }
      total = add_cost(total, brute_cost(g, k, here, memo, bit));
    }
    best = std::min(best, total);
  }
  memo[key] = best;
  return best;
}


// True when the graph's partition of the recorded terms equals the naive one.
inline bool closure_agrees(const RandomGraph& r) {
  Naive uf = naive_closure(r);
  int n = int(r.terms.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((r.g.find(r.terms[i].id) == r.g.find(r.terms[j].id)) != (uf.find(i) == uf.find(j))) return false;
  return true;
}

// Extractor costs against exhaustive search for every class; false on any mismatch.
inline bool extraction_optimal(const EGraph& g) {
  std::map<ClassId, int> bit;
  for (ClassId c : g.class_ids()) bit.emplace(c, int(bit.size()));
  Extractor ex(g);
  for (ClassId c : g.class_ids()) {
    std::map<std::pair<ClassId, std::uint64_t>, Cost> memo;
    Cost want = brute_cost(g, c, 0, memo, bit);
    if (ex.cost_of(c) != want) return false;
    if (want != kInfiniteCost && cost(ex.extract(c)) != want) return false;
  }
  return true;
}

inline ClassId affine_over(EGraph& g, const std::string& text, ClassId child) {
  Expr e = parse(text);
  return g.add(ENode{Head{e.op(), {}}, {g.add_expr(e.child(0)), child}});
}

// The spoke classes of the ship's wheel after the two rotate identities fired:
//   a: (Translate [1,-0.5,0] x1) (Rotate [0,0,0] a)
//   b, c, e, f: (Rotate [0,0,60k] xk) (Rotate [0,0,0] self)
//   d: (Scale [-1,-1,1] x4) (Rotate [0,0,0] d) (Rotate [0,0,180] x4)
inline std::vector<ClassId> wheel_six_classes(EGraph& g) {
  std::vector<ClassId> x;
  for (int k = 1; k <= 6; ++k) x.push_back(g.add_expr(parse("(Cuboid [" + std::to_string(k) + ", 1, 1])")));
  std::vector<ClassId> items;
  items.push_back(affine_over(g, "(Translate [1, -0.5, 0] _)", x[0]));
  const char* angles[] = {"60", "120", nullptr, "240", "300"};
  for (int k = 1; k < 6; ++k) {
    if (k == 3) {
      items.push_back(affine_over(g, "(Scale [-1, -1, 1] _)", x[3]));
      continue;
    }
    items.push_back(affine_over(g, "(Rotate [0, 0, " + std::string(angles[k - 1]) + "] _)", x[std::size_t(k)]));
  }
  for (ClassId& c : items) c = g.merge(c, affine_over(g, "(Rotate [0, 0, 0] _)", c));
  g.rebuild();
  items[3] = g.merge(items[3], affine_over(g, "(Rotate [0, 0, 180] _)", x[3]));
  g.rebuild();
  for (ClassId& c : items) c = g.find(c);
  return items;
}

}  // namespace egraph_oracle
