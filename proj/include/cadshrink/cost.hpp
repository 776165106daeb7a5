#pragma once

#include <cstdint>
#include <limits>

#include "cadshrink/expr.hpp"

namespace cadshrink {

using Cost = std::uint64_t;
inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max();

inline Cost add_cost(Cost a, Cost b) {
  if (a == kInfiniteCost || b == kInfiniteCost) return kInfiniteCost;
  Cost s = a + b;
  return s < a ? kInfiniteCost : s;
}

/// Contribution of one constructor, excluding its children.
Cost node_cost(Op op);

/// Node count; any inverse form makes the whole program unextractable.
Cost cost(const Expr& e);

}  // namespace cadshrink
