#include "cadshrink/extract.hpp"

namespace cadshrink {

Extractor::Extractor(const EGraph& g, NodeCostFn fn) : g_(g) {
  if (!fn) fn = [](const ENode& n) { return node_cost(n.op()); };
  std::vector<ClassId> ids = g.class_ids();
  std::size_t size = ids.empty() ? 0 : ids.back() + 1;
  cost_.assign(size, kInfiniteCost);
  best_.assign(size, nullptr);
  bool changed = true;
  while (changed) {
    changed = false;
    for (ClassId id : ids) {
      for (const auto& n : g.eclass(id).nodes) {
        Cost c = fn(n);
        for (ClassId ch : n.children) {
          if (c == kInfiniteCost) break;
          c = add_cost(c, cost_[g.find(ch)]);
        }
        if (c < cost_[id]) {
          cost_[id] = c;
          best_[id] = &n;
          changed = true;
        }
      }
    }
  }
}

Cost Extractor::cost_of(ClassId c) const {
  c = g_.find(c);
  return c < cost_.size() ? cost_[c] : kInfiniteCost;
}

const ENode* Extractor::best(ClassId c) const {
  c = g_.find(c);
  return c < best_.size() ? best_[c] : nullptr;
}

Expr Extractor::extract(ClassId c) const {
  const ENode* n = best(c);
  if (!n) throw NoFiniteExtraction("class c" + std::to_string(g_.find(c)) + " has no finite-cost representation");
  std::vector<Expr> children;
  children.reserve(n->children.size());
  for (ClassId ch : n->children) children.push_back(extract(ch));
  return Expr(n->head, std::move(children));
}

Expr extract(const EGraph& g, ClassId root, NodeCostFn node_cost) {
  return Extractor(g, std::move(node_cost)).extract(root);
}

}  // namespace cadshrink
