#pragma once

#include <stdexcept>

#include "cadshrink/expr.hpp"

namespace cadshrink {

/// A Scale with a (near-)zero component: pushing it through a Difference is unsound.
class DegenerateScale : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compares two core programs (or lists of them) by canonical form: affines
/// are pushed to the leaves as matrices, Union/Intersection chains become
/// multisets, Differences keep their minuend. Entries match within `eps`.
bool semantic_equiv(const Expr& a, const Expr& b, double eps);

}  // namespace cadshrink
