#include "cadshrink/rewrite.hpp"

#include <stdexcept>

#include "cadshrink/syntax.hpp"

namespace cadshrink {

std::optional<std::vector<Expr>> RuleMemo::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RuleMemo::put(const std::string& key, std::vector<Expr> value) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.emplace(key, std::move(value));
}

const Extractor& RuleContext::costs() {
  if (!costs_) costs_ = std::make_unique<Extractor>(graph);
  return *costs_;
}

namespace {

bool is_pattern_var(const Expr& e) { return e.op() == Op::Var && !e.name().empty() && e.name().front() == '?'; }

}  // namespace

Expr instantiate(const Expr& tmpl, const Subst& s) {
  if (is_pattern_var(tmpl)) {
    auto it = s.vars.find(tmpl.name());
    if (it == s.vars.end()) throw std::logic_error("unbound pattern variable " + tmpl.name());
    return mk::class_ref(it->second);
  }
  if (tmpl.arity() == 0) return tmpl;
  std::vector<Expr> children;
  for (const auto& c : tmpl.children()) {
    if (is_pattern_var(c) && c.name().ends_with("...")) {
      const auto& ids = s.rests.at(c.name().substr(0, c.name().size() - 3));
      for (ClassId id : ids) children.push_back(mk::class_ref(id));
    } else {
      children.push_back(instantiate(c, s));
    }
  }
  return Expr(tmpl.head(), std::move(children));
}

Rewrite make_rewrite(std::string name, std::string group, std::string_view lhs, std::string_view rhs) {
  Expr tmpl = parse(rhs);
  Rewrite r;
  r.name = std::move(name);
  r.group = std::move(group);
  r.lhs = Pattern::parse(lhs);
  r.rhs = [tmpl](RuleContext&, const Match& m) { return std::vector<Expr>{instantiate(tmpl, m.subst)}; };
  return r;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Saturated: return "saturated";
    case StopReason::IterLimit: return "iter_limit";
    case StopReason::NodeLimit: return "node_limit";
    case StopReason::TimeLimit: return "time_limit";
  }
  return "unknown";
}

SaturationReport run_saturation(EGraph& g, const std::vector<Rewrite>& rules, const Limits& limits,
                                double solver_eps) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto out_of_time = [&] { return elapsed() > limits.max_seconds; };

  SaturationReport report;
  RuleMemo memo;
  g.rebuild();
  bool stopped = false;
  while (!stopped) {
    ++report.iterations;
    const auto before = std::make_tuple(g.num_classes(), g.num_nodes(), g.generation());

    // Search and build every right-hand side against the frozen graph.
    std::vector<std::pair<ClassId, Expr>> pending;
    {
      // Classes by the operators they hold, so node-rooted patterns skip the rest.
      const std::vector<ClassId> all = g.class_ids();
      std::map<Op, std::vector<ClassId>> by_op;
      for (ClassId c : all) {
        Op last = Op::ClassRef;
        for (const auto& n : g.eclass(c).nodes) {
          if (n.op() == last) continue;
          auto& v = by_op[n.op()];
          if (v.empty() || v.back() != c) v.push_back(c);
          last = n.op();
        }
      }
      static const std::vector<ClassId> none;
      RuleContext ctx(g, solver_eps, memo);
      for (const auto& rule : rules) {
        if (out_of_time()) {
          report.stop_reason = StopReason::TimeLimit;
          stopped = true;
          break;
        }
        const std::vector<ClassId>* where = &all;
        if (rule.lhs.kind == Pattern::Kind::Node) {
          auto it = by_op.find(rule.lhs.head.op);
          where = it == by_op.end() ? &none : &it->second;
        }
        for (const auto& m : search_in(g, rule.lhs, *where)) {
          for (auto& e : rule.rhs(ctx, m)) {
            pending.emplace_back(m.root, std::move(e));
            ++report.applications[rule.name];
          }
        }
      }
    }

    std::size_t applied = 0;
    for (auto& [root, e] : pending) {
      ClassId id = g.add_expr(e);
      g.merge(root, id);
      if (++applied % 256 == 0 && g.num_nodes() > limits.max_nodes) break;
    }
    g.rebuild();

    if (stopped) break;
    if (std::make_tuple(g.num_classes(), g.num_nodes(), g.generation()) == before) {
      report.stop_reason = StopReason::Saturated;
      break;
    }
    if (g.num_nodes() > limits.max_nodes) {
      report.stop_reason = StopReason::NodeLimit;
      break;
    }
    if (out_of_time()) {
      report.stop_reason = StopReason::TimeLimit;
      break;
    }
    if (report.iterations >= limits.max_iters) {
      report.stop_reason = StopReason::IterLimit;
      break;
    }
  }
  report.enodes = g.num_nodes();
  report.eclasses = g.num_classes();
  report.seconds = elapsed();
  return report;
}

}  // namespace cadshrink
