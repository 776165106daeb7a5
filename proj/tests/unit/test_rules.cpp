#include <set>

#include "cadshrink/rules.hpp"
#include "doctest.h"
#include "rule_instances.hpp"

using namespace cadshrink;

namespace {

const Rewrite& rule_named(const std::string& name) {
  static const std::vector<Rewrite> rules = all_rules();
  for (const auto& r : rules)
    if (r.name == name) return r;
  throw std::runtime_error("no rule " + name);
}

// Printed right-hand sides produced at the root of `text`.
std::vector<std::string> rewrite_root(const std::string& rule, const std::string& text) {
  EGraph g;
  ClassId root = g.add_expr(parse(text));
  g.rebuild();
  RuleMemo memo;
  RuleContext ctx(g, 1e-3, memo);
  std::vector<std::string> out;
  const Rewrite& r = rule_named(rule);
  for (const auto& m : search(g, r.lhs)) {
    if (m.root != g.find(root)) continue;
    for (const auto& e : r.rhs(ctx, m)) out.push_back(print(rules_oracle::materialize(g, e)));
  }
  return out;
}

bool contains(const std::vector<std::string>& xs, const std::string& text) {
  std::string want = print(parse(text));
  return std::find(xs.begin(), xs.end(), want) != xs.end();
}

}  // namespace

TEST_CASE("every rule is sound on random instances") {
  auto rules = all_rules();
  std::set<std::string> names;
  std::uint64_t seed = 1;
  for (const auto& r : rules) {
    CAPTURE(r.name);
    CHECK(names.insert(r.name).second);
    auto s = rules_oracle::check_rule(r, 100, seed++);
    CHECK(s.instances == 100);
    CHECK_MESSAGE(s.failures == 0, s.first_failure);
  }
}

TEST_CASE("rule groups toggle") {
  RuleGroups none{false, false, false, false, false};
  CHECK(all_rules(none).empty());
  RuleGroups no_cad;
  no_cad.cad_identities = false;
  for (const auto& r : all_rules(no_cad)) CHECK(r.group != "cad_identities");
  CHECK(all_rules().size() == reroll_rules().size() + cad_identity_rules().size() + inverse_rules().size() +
                                  bridge_rules().size() + numeric_rules().size());
}

TEST_CASE("binop fold takes the whole chain") {
  auto out = rewrite_root("binop-fold-union", "(Union (Union (Sphere 1) (Sphere 2)) (Sphere 3))");
  REQUIRE(out.size() == 1);
  CHECK(contains(out, "(Fold Union (List (Sphere 1) (Sphere 2) (Sphere 3)))"));
  // The inner node of the spine is left alone.
  EGraph g;
  g.add_expr(parse("(Union (Union (Sphere 1) (Sphere 2)) (Sphere 3))"));
  g.rebuild();
  RuleMemo memo;
  RuleContext ctx(g, 1e-3, memo);
  int produced = 0;
  const Rewrite& r = rule_named("binop-fold-union");
  for (const auto& m : search(g, r.lhs)) produced += int(r.rhs(ctx, m).size());
  CHECK(produced == 1);
}

TEST_CASE("repeat needs one class") {
  CHECK(contains(rewrite_root("repeat", "(List (Sphere 1) (Sphere 1) (Sphere 1))"), "(Repeat 3 (Sphere 1))"));
  CHECK(rewrite_root("repeat", "(List (Sphere 1) (Sphere 2))").empty());
}

TEST_CASE("tabulate over map2") {
  auto out = rewrite_root("tabulate-repeat-over-map2-rotate",
                          "(Map2 Rotate (Tabulate (i 6) [0, 0, 60*i]) (Repeat 6 (Cuboid [10, 1, 1])))");
  CHECK(contains(out, "(Tabulate (i 6) (Rotate [0, 0, 60*i] (Cuboid [10, 1, 1])))"));
  CHECK(rewrite_root("tabulate-repeat-over-map2-rotate",
                     "(Map2 Rotate (Tabulate (i 6) [0, 0, 60*i]) (Repeat 5 (Cuboid [10, 1, 1])))")
            .empty());
}

TEST_CASE("scale translate interchange") {
  CHECK(contains(rewrite_root("scale-translate-interchange", "(Scale [2, 3, 4] (Translate [1, 1, 1] (Sphere 1)))"),
                 "(Translate [2, 3, 4] (Scale [2, 3, 4] (Sphere 1)))"));
}

TEST_CASE("cylinder to unit") {
  CHECK(contains(rewrite_root("cylinder-to-unit", "(Cylinder [1, 5])"), "(Scale [5, 5, 1] (Cylinder [1, 1]))"));
  CHECK(contains(rewrite_root("unit-to-cylinder", "(Scale [5, 5, 1] (Cylinder [1, 1]))"), "(Cylinder [1, 5])"));
  CHECK(rewrite_root("unit-to-cylinder", "(Scale [5, 4, 1] (Cylinder [1, 1]))").empty());
}

TEST_CASE("identity introduction only in list context") {
  EGraph g;
  ClassId s = g.add_expr(parse("(Sphere 1)"));
  g.add_expr(parse("(List (Sphere 1) (Sphere 2))"));
  ClassId lone = g.add_expr(parse("(Cuboid [1, 1, 1])"));
  g.rebuild();
  RuleMemo memo;
  RuleContext ctx(g, 1e-3, memo);
  const Rewrite& r = rule_named("rotate-identity-intro");
  std::set<ClassId> fired;
  for (const auto& m : search(g, r.lhs))
    if (!r.rhs(ctx, m).empty()) fired.insert(m.root);
  CHECK(fired.count(g.find(s)) == 1);
  CHECK(fired.count(g.find(lone)) == 0);
  CHECK(fired.size() == 2);
}

TEST_CASE("sort application gathers") {
  auto out = rewrite_root("sort-apply",
                          "(Sort (1 5 0 3 4 2) (List (Sphere 0) (Sphere 1) (Sphere 2) (Sphere 3) (Sphere 4) (Sphere 5)))");
  CHECK(contains(out, "(List (Sphere 1) (Sphere 5) (Sphere 0) (Sphere 3) (Sphere 4) (Sphere 2))"));
}

TEST_CASE("unsort elimination under a union fold only") {
  std::string l = "(Unsort (1 0) (List (Sphere 1) (Sphere 2)))";
  CHECK(contains(rewrite_root("unsort-elim-fold-union", "(Fold Union " + l + ")"),
                 "(Fold Union (List (Sphere 1) (Sphere 2)))"));
  for (const auto& r : all_rules()) {
    if (r.name.find("unsort-elim-fold") == std::string::npos) continue;
    CHECK(rewrite_root(r.name, "(Fold Difference " + l + ")").empty());
  }
}

TEST_CASE("unspherical translate") {
  auto out = rewrite_root("unspherical-translate",
                          "(Map2 Translate (Unspherical 2 [1, 2, 3] (List [1, 0, 90] [1, 90, 90])) (List (Sphere 1) (Sphere 2)))");
  CHECK(contains(out,
                 "(Map2 Translate (Repeat 2 [1, 2, 3]) (Map2 TranslateSpherical (List [1, 0, 90] [1, 90, 90]) (List (Sphere 1) (Sphere 2))))"));
}

TEST_CASE("unsort lifts over unpart") {
  std::string spokes;
  for (int k = 0; k < 6; ++k) spokes += " (Sphere " + std::to_string(k + 2) + ")";
  auto out = rewrite_root("unsort-unpart-lift",
                          "(Unpart (1 6) (List (Cylinder [1, 5])) (Unsort (1 5 0 3 4 2) (List" + spokes + ")))");
  REQUIRE(out.size() == 1);
  CHECK(contains(out, "(Unsort (0 2 6 1 4 5 3) (Unpart (1 6) (List (Cylinder [1, 5])) (List" + spokes + ")))"));
}

TEST_CASE("fold bridges") {
  CHECK(contains(rewrite_root("fold-singleton-union", "(Fold Union (List (Sphere 1)))"), "(Sphere 1)"));
  CHECK(contains(rewrite_root("fold-unpart-split-union", "(Fold Union (Unpart (1 2) (List (Sphere 1)) (List (Sphere 2) (Sphere 3))))"),
                 "(Fold Union (List (Fold Union (List (Sphere 1))) (Fold Union (List (Sphere 2) (Sphere 3)))))"));
  CHECK(contains(rewrite_root("fold-flatten-union",
                              "(Fold Union (List (Sphere 1) (Fold Union (List (Sphere 2) (Sphere 3))) (Sphere 4)))"),
                 "(Fold Union (List (Sphere 1) (Sphere 2) (Sphere 3) (Sphere 4)))"));
}

TEST_CASE("constant folding") {
  CHECK(contains(rewrite_root("const-fold-add", "2+3"), "5"));
  CHECK(contains(rewrite_root("const-fold-mul", "60*2"), "120"));
  CHECK(rewrite_root("const-fold-div", "1/0").empty());
}
