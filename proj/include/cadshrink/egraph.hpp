#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cadshrink/expr.hpp"

namespace cadshrink {

using ClassId = std::uint32_t;

struct ENode {
  Head head;
  std::vector<ClassId> children;
  std::uint64_t stamp = 0;  // insertion order, ignored by == and hashing

  Op op() const { return head.op; }
  bool operator==(const ENode& o) const { return head == o.head && children == o.children; }
};

struct ENodeHash {
  std::size_t operator()(const ENode& n) const;
};

/// What the solvers need to know about a class without walking it.
struct ClassData {
  enum class Kind : std::uint8_t { Unknown, Num, Vec, Cad, VecList, CadList, ListList };
  Kind kind = Kind::Unknown;
  int dim = 0;  // 1 for numbers, 2/3 for vectors; 0 when not constant
  Vec3d value{};

  bool constant() const { return dim > 0; }
  bool operator==(const ClassData&) const = default;
};

struct EClass {
  ClassId id = 0;
  std::vector<ENode> nodes;                         // sorted by stamp after rebuild
  std::vector<std::pair<ENode, ClassId>> parents;  // uses of this class
  ClassData data;
};

class EGraph {
 public:
  /// Hashconsed insertion; the node's children must be live ids.
  ClassId add(ENode node);
  /// Adds a tree bottom-up. ClassRef leaves name existing classes.
  ClassId add_expr(const Expr& e);
  std::optional<ClassId> lookup(ENode node) const;

  ClassId find(ClassId id) const;
  ClassId merge(ClassId a, ClassId b);
  /// Restores congruence and re-canonicalises the hashcons.
  void rebuild();

  const EClass& eclass(ClassId id) const { return classes_.at(find(id)); }
  const ClassData& data(ClassId id) const { return eclass(id).data; }
  std::vector<ClassId> class_ids() const;  // canonical, ascending

  std::size_t num_classes() const { return live_classes_; }
  std::size_t num_nodes() const;
  std::uint64_t generation() const { return generation_; }
  bool clean() const { return pending_.empty() && analysis_pending_.empty(); }

  ENode canonicalize(ENode node) const;

  /// True when no two distinct classes hold congruent nodes and every class
  /// node is reachable through the hashcons.
  bool audit() const;

  /// One line per class: "c3: Rotate(c1, c2) | Scale(c4, c2)".
  std::string dump() const;

 private:
  std::vector<ClassId> parent_;
  std::vector<EClass> classes_;  // indexed by id; merged-away entries are emptied
  std::vector<bool> live_;
  std::size_t live_classes_ = 0;
  std::unordered_map<ENode, ClassId, ENodeHash> memo_;
  std::set<double> literals_;
  std::vector<std::pair<ENode, ClassId>> pending_;
  std::vector<std::pair<ENode, ClassId>> analysis_pending_;
  std::uint64_t stamp_ = 0;
  std::uint64_t generation_ = 0;

  ClassId find_mut(ClassId id);
  double snap_literal(double x);
  ClassData make_data(const ENode& node) const;
  void repair_classes();
};

std::string describe(const ENode& node);

/// Payload numbers are hashconsed by their 12-significant-digit value.
Head canonical_head(Head head);

}  // namespace cadshrink
