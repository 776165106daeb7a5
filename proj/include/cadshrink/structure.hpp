#pragma once

#include <array>
#include <vector>

#include "cadshrink/egraph.hpp"

namespace cadshrink {

/// How many Translate, Rotate and Scale nodes a class holds.
struct AffineSignature {
  std::array<int, 3> counts{};

  int count(Op kind) const;
  bool operator==(const AffineSignature&) const = default;
  auto operator<=>(const AffineSignature&) const = default;
};

AffineSignature affine_signature(const EGraph& g, ClassId c);

struct Group {
  AffineSignature signature;
  std::vector<std::size_t> members;  // positions in the list
};

/// Groups in order of first occurrence.
std::vector<Group> group_by_signature(const EGraph& g, const std::vector<ClassId>& items);

/// (Map2 K (List p...) (List c...)) candidates over class references. Within a
/// group every member contributes its j-th K node; choices across groups are
/// enumerated by increasing index sum, at most `cap` per affine kind.
std::vector<Expr> find_map2s(const EGraph& g, const std::vector<ClassId>& items, std::size_t cap = 8);

}  // namespace cadshrink
