#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cadshrink/egraph.hpp"
#include "cadshrink/extract.hpp"
#include "cadshrink/pattern.hpp"

namespace cadshrink {

/// Results of expensive rule bodies keyed by a canonical node description.
/// Survives across iterations of one saturation run.
class RuleMemo {
 public:
  std::optional<std::vector<Expr>> get(const std::string& key) const;
  void put(const std::string& key, std::vector<Expr> value);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<Expr>> entries_;
};

/// Read-only view handed to right-hand sides.
class RuleContext {
 public:
  RuleContext(const EGraph& g, double solver_eps, RuleMemo& memo) : graph(g), solver_eps(solver_eps), memo(memo) {}

  const EGraph& graph;
  double solver_eps;
  RuleMemo& memo;

  /// Cheapest-representative snapshot, built on first use.
  const Extractor& costs();

 private:
  std::unique_ptr<Extractor> costs_;
};

/// Builds right-hand sides; an empty result means the rule declines.
using Applier = std::function<std::vector<Expr>(RuleContext&, const Match&)>;

struct Rewrite {
  std::string name;
  std::string group;
  Pattern lhs;
  Applier rhs;
};

/// A purely syntactic rule: `?x` in `rhs` becomes the class bound by the match
/// and `?xs...` splices the bound children.
Rewrite make_rewrite(std::string name, std::string group, std::string_view lhs, std::string_view rhs);

/// Replaces pattern variables in a template with class references.
Expr instantiate(const Expr& tmpl, const Subst& s);

enum class StopReason { Saturated, IterLimit, NodeLimit, TimeLimit };
std::string stop_reason_name(StopReason r);

struct Limits {
  int max_iters = 30;
  std::size_t max_nodes = 100000;
  double max_seconds = 10.0;
};

struct SaturationReport {
  StopReason stop_reason = StopReason::Saturated;
  int iterations = 0;
  std::size_t enodes = 0;
  std::size_t eclasses = 0;
  double seconds = 0.0;
  std::map<std::string, std::size_t> applications;  // per rule, results that changed the graph or not
};

SaturationReport run_saturation(EGraph& g, const std::vector<Rewrite>& rules, const Limits& limits,
                                double solver_eps = 1e-3);

}  // namespace cadshrink
