#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "cadshrink/cost.hpp"
#include "cadshrink/egraph.hpp"

namespace cadshrink {

class NoFiniteExtraction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeCostFn = std::function<Cost(const ENode&)>;

/// Bottom-up least-cost fixpoint over a clean graph. Ties go to the node
/// inserted first.
class Extractor {
 public:
  explicit Extractor(const EGraph& g, NodeCostFn node_cost = {});

  Cost cost_of(ClassId c) const;
  /// The winning node, or nullptr when the class has no finite representation.
  const ENode* best(ClassId c) const;
  Expr extract(ClassId c) const;

 private:
  const EGraph& g_;
  std::vector<Cost> cost_;
  std::vector<const ENode*> best_;
};

Expr extract(const EGraph& g, ClassId root, NodeCostFn node_cost = {});

}  // namespace cadshrink
