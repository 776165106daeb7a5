#include "cadshrink/structure.hpp"

#include <algorithm>
#include <functional>

namespace cadshrink {
namespace {

constexpr std::array<Op, 3> kKinds = {Op::Translate, Op::Rotate, Op::Scale};

int slot(Op kind) {
  for (std::size_t i = 0; i < kKinds.size(); ++i)
    if (kKinds[i] == kind) return static_cast<int>(i);
  return -1;
}

std::vector<const ENode*> nodes_of_kind(const EGraph& g, ClassId c, Op kind) {
  std::vector<const ENode*> out;
  for (const auto& n : g.eclass(c).nodes)
    if (n.op() == kind) out.push_back(&n);
  return out;
}

// Index tuples with sum `total`, in lexicographic order, until `cap` are found.
void tuples_with_sum(const std::vector<int>& sizes, int total, std::size_t cap, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  if (out.size() >= cap) return;
  std::size_t k = cur.size();
  if (k == sizes.size()) {
    if (total == 0) out.push_back(cur);
    return;
  }
  int rest_max = 0;
  for (std::size_t i = k + 1; i < sizes.size(); ++i) rest_max += sizes[i] - 1;
  for (int j = 0; j < sizes[k] && j <= total; ++j) {
    if (total - j > rest_max) continue;
    cur.push_back(j);
    tuples_with_sum(sizes, total - j, cap, cur, out);
    cur.pop_back();
    if (out.size() >= cap) return;
  }
}

}  // namespace

int AffineSignature::count(Op kind) const {
  int s = slot(kind);
  return s < 0 ? 0 : counts[static_cast<std::size_t>(s)];
}

AffineSignature affine_signature(const EGraph& g, ClassId c) {
  AffineSignature sig;
  for (const auto& n : g.eclass(c).nodes)
    if (int s = slot(n.op()); s >= 0) ++sig.counts[static_cast<std::size_t>(s)];
  return sig;
}

std::vector<Group> group_by_signature(const EGraph& g, const std::vector<ClassId>& items) {
  std::vector<Group> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    AffineSignature sig = affine_signature(g, items[i]);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) { return gr.signature == sig; });
    if (it == groups.end()) {
      groups.push_back(Group{sig, {i}});
    } else {
      it->members.push_back(i);
    }
  }
  return groups;
}

std::vector<Expr> find_map2s(const EGraph& g, const std::vector<ClassId>& items, std::size_t cap) {
  std::vector<Expr> out;
  if (items.size() < 2) return out;
  std::vector<Group> groups = group_by_signature(g, items);
  for (Op kind : kKinds) {
    std::vector<int> sizes;
    for (const auto& gr : groups) sizes.push_back(gr.signature.count(kind));
    if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s == 0; })) continue;

    int max_total = 0;
    for (int s : sizes) max_total += s - 1;
    std::vector<std::vector<int>> choices;
    for (int total = 0; total <= max_total && choices.size() < cap; ++total) {
      std::vector<int> cur;
      tuples_with_sum(sizes, total, cap, cur, choices);
    }

    for (const auto& choice : choices) {
      std::vector<Expr> params(items.size()), cads(items.size());
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (std::size_t pos : groups[gi].members) {
          auto nodes = nodes_of_kind(g, items[pos], kind);
          const ENode* n = nodes.at(static_cast<std::size_t>(choice[gi]));
          params[pos] = mk::class_ref(g.find(n->children[0]));
          cads[pos] = mk::class_ref(g.find(n->children[1]));
        }
      }
      out.push_back(mk::map2(kind, mk::list(std::move(params)), mk::list(std::move(cads))));
    }
  }
  return out;
}

}  // namespace cadshrink
