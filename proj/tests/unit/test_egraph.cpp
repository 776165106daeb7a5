#include <map>
#include <numeric>
#include <random>
#include <set>

#include "cadshrink/cost.hpp"
#include "cadshrink/egraph.hpp"
#include "cadshrink/extract.hpp"
#include "cadshrink/pattern.hpp"
#include "cadshrink/rewrite.hpp"
#include "cadshrink/rules.hpp"
#include "cadshrink/syntax.hpp"
#include "doctest.h"
#include "egraph_oracles.hpp"

using namespace cadshrink;
using namespace egraph_oracle;


TEST_CASE("add is idempotent") {
  EGraph g;
  ClassId a = g.add_expr(parse("(Sphere 1)"));
  ClassId b = g.add_expr(parse("(Sphere 1)"));
  CHECK(a == b);
  CHECK(g.num_classes() == 2);
}

TEST_CASE("near-equal long literals share a class, short decimals stay exact") {
  EGraph g;
  ClassId e1 = g.add_expr(mk::num(2.71828182846));
  ClassId e2 = g.add_expr(mk::num(2.71828182847));
  ClassId e3 = g.add_expr(mk::num(2.71828183846));
  CHECK(e1 == e2);
  CHECK(e1 != e3);
  ClassId one = g.add_expr(mk::num(1));
  ClassId near_one = g.add_expr(mk::num(1.00000000001));
  CHECK(one != near_one);
  CHECK(g.add_expr(mk::num(1)) == one);
  CHECK(g.add_expr(parse("(Sphere 2.71828182847)")) == g.add_expr(parse("(Sphere 2.71828182846)")));
}

TEST_CASE("merging arguments merges congruent parents") {
  EGraph g;
  ClassId x = g.add(leaf("x")), y = g.add(leaf("y")), z = g.add(leaf("z"));
  ClassId xy = g.add(node(Op::Add, {x, y}));
  ClassId xz = g.add(node(Op::Add, {x, z}));
  CHECK(g.find(xy) != g.find(xz));
  g.merge(y, z);
  g.rebuild();
  CHECK(g.find(xy) == g.find(xz));
  CHECK(g.add(node(Op::Add, {x, z})) == g.find(xy));
  CHECK(g.audit());
}

TEST_CASE("self merge and clean rebuild change nothing") {
  EGraph g;
  ClassId c = g.add_expr(parse("(Union (Sphere 1) (Sphere 2))"));
  std::string before = g.dump();
  CHECK(g.merge(c, c) == c);
  g.rebuild();
  CHECK(g.dump() == before);
}

TEST_CASE("class count never exceeds distinct subtrees") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    EGraph g;
    Expr e = parse("(Union (Union (Sphere 1) (Translate [1, 1, 1] (Sphere 1))) (Translate [1, 1, 1] (Sphere 1)))");
    g.add_expr(e);
    std::set<std::string> distinct;
    std::function<void(const Expr&)> go = [&](const Expr& x) {
      distinct.insert(print(x));
      for (const auto& c : x.children()) go(c);
    };
    go(e);
    CHECK(g.num_classes() <= distinct.size());
  }
}

TEST_CASE("congruence propagates through a chain of five") {
  EGraph g;
  ClassId a = g.add(leaf("a")), b = g.add(leaf("b"));
  std::vector<ClassId> left{a}, right{b};
  for (int d = 0; d < 5; ++d) {
    left.push_back(g.add(node(Op::Sphere, {left.back()})));
    right.push_back(g.add(node(Op::Sphere, {right.back()})));
  }
  g.merge(a, b);
  g.rebuild();
  for (int d = 0; d <= 5; ++d) CHECK(g.find(left[d]) == g.find(right[d]));
  CHECK(g.num_classes() == 6);
  CHECK(g.audit());
}

TEST_CASE("random merges match naive congruence closure") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    RandomGraph r = random_graph(rng, 5 + int(rng() % 46), 1 + int(rng() % 6));
    REQUIRE(r.g.num_nodes() <= 50);
    CHECK_MESSAGE(closure_agrees(r), "trial " << trial);
    CHECK(r.g.audit());
  }
}

TEST_CASE("search finds one scale") {
  EGraph g;
  g.add_expr(parse("(Union (Scale [2, 2, 2] (Sphere 1)) (Translate [1, 0, 0] (Sphere 1)))"));
  g.rebuild();
  auto ms = search(g, Pattern::parse("(Scale ?v ?c)"));
  REQUIRE(ms.size() == 1);
  CHECK(g.find(ms[0].subst["?c"]) == g.find(*g.lookup(ENode{Head{Op::Sphere, {}}, {*g.lookup(ENode{Head{Op::Num, 1.0}, {}})}})));
}

TEST_CASE("rest variables bind the list tail") {
  EGraph g;
  ClassId l = g.add_expr(parse("(List (Sphere 1) (Sphere 2) (Sphere 3))"));
  g.rebuild();
  auto ms = search(g, Pattern::parse("(List ?first ?rest...)"));
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].root == g.find(l));
  CHECK(ms[0].subst.rest("?rest").size() == 2);
}

TEST_CASE("variadic list pattern binds the six wheel spokes") {
  EGraph g;
  std::string spokes;
  for (int k = 0; k < 6; ++k)
    spokes += " (Rotate [0, 0, " + std::to_string(60 * k) + "] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))";
  g.add_expr(parse("(List" + spokes + ")"));
  g.rebuild();
  auto ms = search(g, Pattern::parse("(List (Rotate ?p ?c) ?rest...)"));
  REQUIRE(ms.size() == 1);
  for (ClassId c : ms[0].node.children) {
    bool rotate = false;
    for (const auto& n : g.eclass(c).nodes) rotate |= n.op() == Op::Rotate;
    CHECK(rotate);
  }
  CHECK(ms[0].node.children.size() == 6);
}

TEST_CASE("search agrees with direct enumeration") {
  // (Union ?a (Sphere ?r)): every Union node whose right class holds a Sphere.
  std::mt19937_64 rng(77);
  Pattern p = Pattern::parse("(Union ?a (Sphere ?r))");
  for (int trial = 0; trial < 200; ++trial) {
    RandomGraph r = random_graph(rng, 5 + int(rng() % 26), int(rng() % 4));
    std::set<std::tuple<ClassId, ClassId, ClassId>> want, got;
    for (ClassId c : r.g.class_ids())
      for (const auto& n : r.g.eclass(c).nodes) {
        if (n.op() != Op::Union) continue;
        for (const auto& s : r.g.eclass(n.children[1]).nodes)
          if (s.op() == Op::Sphere) want.insert({c, r.g.find(n.children[0]), r.g.find(s.children[0])});
      }
    for (const auto& m : search(r.g, p)) got.insert({m.root, r.g.find(m.subst["?a"]), r.g.find(m.subst["?r"])});
    CHECK(got == want);
  }
}

TEST_CASE("empty rule set saturates at once") {
  EGraph g;
  g.add_expr(parse("(Union (Sphere 1) (Sphere 2))"));
  g.rebuild();
  std::string before = g.dump();
  auto rep = run_saturation(g, {}, Limits{});
  CHECK(rep.stop_reason == StopReason::Saturated);
  CHECK(rep.iterations == 1);
  CHECK(g.dump() == before);
}

TEST_CASE("translate combination adds the summed translate") {
  std::vector<Rewrite> rules;
  for (auto& r : cad_identity_rules())
    if (r.name == "translate-combine") rules.push_back(r);
  for (auto& r : numeric_rules()) rules.push_back(r);
  REQUIRE(!rules.empty());
  EGraph g;
  ClassId root = g.add_expr(parse("(Translate [1, 0, 0] (Translate [2, 0, 0] (Cuboid [1, 1, 1])))"));
  g.rebuild();
  run_saturation(g, rules, Limits{});
  ClassId probe = g.add_expr(parse("(Translate [3, 0, 0] (Cuboid [1, 1, 1]))"));
  g.rebuild();
  CHECK(g.find(probe) == g.find(root));
}

TEST_CASE("iteration and node limits stop saturation") {
  EGraph g;
  std::string wheel = "(Union (Cylinder [1, 5])";
  for (int k = 0; k < 6; ++k)
    wheel += " (Rotate [0, 0, " + std::to_string(60 * k) + "] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))";
  g.add_expr(parse(wheel + ")"));
  g.rebuild();
  auto rep = run_saturation(g, all_rules(), Limits{1, 100000, 10.0});
  CHECK(rep.stop_reason == StopReason::IterLimit);
  CHECK(rep.iterations == 1);
  EGraph h;
  h.add_expr(parse(wheel + ")"));
  h.rebuild();
  auto small = run_saturation(h, all_rules(), Limits{30, 60, 10.0});
  CHECK(small.stop_reason == StopReason::NodeLimit);
}

TEST_CASE("saturation is deterministic") {
  std::string text = "(Union (Sphere 1) (Translate [2, 0, 0] (Sphere 1)) (Translate [4, 0, 0] (Sphere 1)) (Translate [6, 0, 0] (Sphere 1)))";
  std::string dumps[2], outs[2];
  for (int run = 0; run < 2; ++run) {
    EGraph g;
    ClassId root = g.add_expr(parse(text));
    g.rebuild();
    run_saturation(g, all_rules(), Limits{});
    dumps[run] = g.dump();
    outs[run] = print(extract(g, root));
  }
  CHECK(dumps[0] == dumps[1]);
  CHECK(outs[0] == outs[1]);
}

TEST_CASE("extraction of a singleton") {
  EGraph g;
  ClassId c = g.add_expr(parse("(Sphere 1)"));
  g.rebuild();
  CHECK(extract(g, c) == parse("(Sphere 1)"));
}

TEST_CASE("extraction drops an identity rotation") {
  EGraph g;
  ClassId c = g.add_expr(parse("(Cuboid [1, 2, 3])"));
  ClassId r = g.add_expr(parse("(Rotate [0, 0, 0] (Cuboid [1, 2, 3]))"));
  g.merge(c, r);
  g.rebuild();
  CHECK(extract(g, r) == parse("(Cuboid [1, 2, 3])"));
}

TEST_CASE("inverse forms are never extracted") {
  EGraph g;
  ClassId c = g.add_expr(parse("(Unsort (0) (List (Sphere 1)))"));
  g.rebuild();
  CHECK_THROWS_AS(extract(g, c), NoFiniteExtraction);
  ClassId plain = g.add_expr(parse("(List (Sphere 1))"));
  g.merge(c, plain);
  g.rebuild();
  CHECK(extract(g, c) == parse("(List (Sphere 1))"));
}

TEST_CASE("extraction matches exhaustive search") {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 200) {
    RandomGraph r = random_graph(rng, 6 + int(rng() % 20), 1 + int(rng() % 5));
    if (r.g.num_classes() > 20) continue;
    CHECK(extraction_optimal(r.g));
    ++checked;
  }
}

TEST_CASE("finite costs only come from finite children") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    RandomGraph r = random_graph(rng, 30, 4);
    Extractor ex(r.g);
    for (ClassId c : r.g.class_ids()) {
      const ENode* best = ex.best(c);
      if (!best) continue;
      Cost sum = node_cost(best->op());
      for (ClassId k : best->children) {
        REQUIRE(ex.cost_of(k) != kInfiniteCost);
        sum = add_cost(sum, ex.cost_of(k));
      }
      CHECK(sum == ex.cost_of(c));
    }
  }
}

TEST_CASE("dump lists classes one per line") {
  EGraph g;
  g.add_expr(parse("(Sphere 1)"));
  g.rebuild();
  std::string d = g.dump();
  CHECK(std::count(d.begin(), d.end(), '\n') == 2);
  CHECK(d.find("Sphere") != std::string::npos);
}
