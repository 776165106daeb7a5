#include "cadshrink/egraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cadshrink/syntax.hpp"

namespace cadshrink {

std::size_t ENodeHash::operator()(const ENode& n) const {
  std::size_t h = hash_head(n.head);
  for (ClassId c : n.children) h ^= std::hash<ClassId>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Head canonical_head(Head head) {
  if (auto* d = std::get_if<double>(&head.payload)) *d = round_sig(*d);
  return head;
}

namespace {

using Kind = ClassData::Kind;

Kind list_kind(Kind item) {
  switch (item) {
    case Kind::Cad: return Kind::CadList;
    case Kind::Vec: return Kind::VecList;
    case Kind::VecList:
    case Kind::CadList:
    case Kind::ListList: return Kind::ListList;
    default: return Kind::Unknown;
  }
}

// Joins b into a; returns true when a changed.
bool join(ClassData& a, const ClassData& b) {
  bool changed = false;
  if (a.kind == Kind::Unknown && b.kind != Kind::Unknown) {
    a.kind = b.kind;
    changed = true;
  }
  if (!a.constant() && b.constant()) {
    a.dim = b.dim;
    a.value = b.value;
    changed = true;
  }
  return changed;
}

}  // namespace

ClassId EGraph::find(ClassId id) const {
  while (parent_.at(id) != id) id = parent_[id];
  return id;
}

ClassId EGraph::find_mut(ClassId id) {
  ClassId root = find(id);
  while (parent_[id] != root) {
    ClassId next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonicalize(ENode node) const {
  for (auto& c : node.children) c = find(c);
  return node;
}

std::optional<ClassId> EGraph::lookup(ENode node) const {
  node.head = canonical_head(std::move(node.head));
  node = canonicalize(std::move(node));
  auto it = memo_.find(node);
  if (it == memo_.end()) return std::nullopt;
  return find(it->second);
}

ClassData EGraph::make_data(const ENode& node) const {
  ClassData d;
  auto child = [&](std::size_t i) -> const ClassData& { return classes_[find(node.children[i])].data; };
  switch (node.op()) {
    case Op::Num:
      d.kind = Kind::Num;
      d.dim = 1;
      d.value[0] = std::get<double>(node.head.payload);
      break;
    case Op::Var:
      d.kind = Kind::Num;
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      d.kind = Kind::Num;
      const auto& a = child(0);
      const auto& b = child(1);
      if (a.dim == 1 && b.dim == 1) {
        double x = a.value[0], y = b.value[0], r = 0;
        bool ok = true;
        switch (node.op()) {
          case Op::Add: r = x + y; break;
          case Op::Sub: r = x - y; break;
          case Op::Mul: r = x * y; break;
          default:
            ok = y != 0.0;
            if (ok) r = x / y;
        }
        if (ok && std::isfinite(r)) {
          d.dim = 1;
          d.value[0] = round_sig(r);
        }
      }
      break;
    }
    case Op::Vec2:
    case Op::Vec3: {
      d.kind = Kind::Vec;
      bool all = true;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& c = child(i);
        if (c.dim != 1) {
          all = false;
          break;
        }
        d.value[i] = c.value[0];
      }
      if (all) d.dim = static_cast<int>(node.children.size());
      break;
    }
    case Op::Cuboid:
    case Op::Sphere:
    case Op::Cylinder:
    case Op::HexPrism:
    case Op::Translate:
    case Op::Rotate:
    case Op::Scale:
    case Op::TranslateSpherical:
    case Op::Union:
    case Op::Difference:
    case Op::Intersection:
    case Op::Fold:
      d.kind = Kind::Cad;
      break;
    case Op::List:
      d.kind = node.children.empty() ? Kind::Unknown : list_kind(child(0).kind);
      break;
    case Op::Concat:
    case Op::Sort:
    case Op::Unsort:
    case Op::Unpart:
      for (std::size_t i = 0; i < node.children.size() && d.kind == Kind::Unknown; ++i) d.kind = child(i).kind;
      break;
    case Op::Tabulate:
    case Op::Repeat:
      d.kind = list_kind(child(0).kind);
      break;
    case Op::Map2:
      d.kind = Kind::CadList;
      break;
    case Op::Part:
      d.kind = Kind::ListList;
      break;
    case Op::Spherical:
    case Op::Unspherical:
      d.kind = Kind::VecList;
      break;
    case Op::ClassRef:
      break;
  }
  return d;
}

// Derived literals that differ from an existing one by less than this relative
// amount reuse it. Chains of combine and interchange over jittered inputs
// otherwise mint new second-order products every iteration.
constexpr double kLiteralSnap = 1e-9;

double EGraph::snap_literal(double x) {
  // Short decimals are kept exactly so identity patterns still see 0, 1, 180.
  if (round_sig(x, 6) == x) return x;
  double tol = kLiteralSnap * std::max(1.0, std::abs(x));
  auto it = literals_.lower_bound(x - tol);
  if (it != literals_.end() && *it <= x + tol) return *it;
  literals_.insert(x);
  return x;
}

ClassId EGraph::add(ENode node) {
  node.head = canonical_head(std::move(node.head));
  if (node.op() == Op::Num) node.head.payload = snap_literal(std::get<double>(node.head.payload));
  node = canonicalize(std::move(node));
  if (auto it = memo_.find(node); it != memo_.end()) return find(it->second);
  ClassId id = static_cast<ClassId>(classes_.size());
  node.stamp = stamp_++;
  parent_.push_back(id);
  EClass cls;
  cls.id = id;
  cls.data = make_data(node);
  cls.nodes.push_back(node);
  classes_.push_back(std::move(cls));
  live_.push_back(true);
  ++live_classes_;
  for (ClassId c : node.children) classes_[find(c)].parents.emplace_back(node, id);
  memo_.emplace(node, id);
  ++generation_;
  return id;
}

ClassId EGraph::add_expr(const Expr& e) {
  if (e.op() == Op::ClassRef) {
    ClassId id = static_cast<ClassId>(e.count());
    if (id >= parent_.size()) throw std::out_of_range("class reference #" + std::to_string(id) + " does not exist");
    return find(id);
  }
  ENode node;
  node.head = e.head();
  node.children.reserve(e.arity());
  for (const auto& c : e.children()) node.children.push_back(add_expr(c));
  return add(std::move(node));
}

ClassId EGraph::merge(ClassId a, ClassId b) {
  a = find_mut(a);
  b = find_mut(b);
  if (a == b) return a;
  // The class with more uses keeps its id; ties keep the older id.
  auto weight = [&](ClassId c) { return classes_[c].parents.size() + classes_[c].nodes.size(); };
  if (weight(b) > weight(a) || (weight(b) == weight(a) && b < a)) std::swap(a, b);
  parent_[b] = a;
  EClass& root = classes_[a];
  EClass& gone = classes_[b];
  pending_.insert(pending_.end(), gone.parents.begin(), gone.parents.end());
  bool root_changed = join(root.data, gone.data);
  bool gone_changed = !(root.data == gone.data);
  if (root_changed) analysis_pending_.insert(analysis_pending_.end(), root.parents.begin(), root.parents.end());
  if (gone_changed) analysis_pending_.insert(analysis_pending_.end(), gone.parents.begin(), gone.parents.end());
  root.nodes.insert(root.nodes.end(), std::make_move_iterator(gone.nodes.begin()),
                    std::make_move_iterator(gone.nodes.end()));
  root.parents.insert(root.parents.end(), std::make_move_iterator(gone.parents.begin()),
                      std::make_move_iterator(gone.parents.end()));
  gone.nodes.clear();
  gone.parents.clear();
  live_[b] = false;
  --live_classes_;
  ++generation_;
  return a;
}

void EGraph::rebuild() {
  while (!pending_.empty() || !analysis_pending_.empty()) {
    while (!pending_.empty()) {
      auto [node, cls] = std::move(pending_.back());
      pending_.pop_back();
      node = canonicalize(std::move(node));
      auto [it, inserted] = memo_.emplace(node, find(cls));
      if (!inserted) {
        ClassId other = it->second;
        it->second = find(cls);
        merge(other, cls);
      }
    }
    while (!analysis_pending_.empty()) {
      auto [node, cls] = std::move(analysis_pending_.back());
      analysis_pending_.pop_back();
      ClassId c = find(cls);
      ClassData d = make_data(canonicalize(node));
      if (join(classes_[c].data, d)) {
        analysis_pending_.insert(analysis_pending_.end(), classes_[c].parents.begin(), classes_[c].parents.end());
      }
    }
  }
  repair_classes();
}

void EGraph::repair_classes() {
  memo_.clear();
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (!live_[i]) continue;
    EClass& cls = classes_[i];
    for (auto& n : cls.nodes) n = canonicalize(std::move(n));
    std::sort(cls.nodes.begin(), cls.nodes.end(), [](const ENode& x, const ENode& y) {
      if (auto c = compare_head(x.head, y.head); c != 0) return c < 0;
      if (x.children != y.children) return x.children < y.children;
      return x.stamp < y.stamp;
    });
    cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()), cls.nodes.end());
    std::sort(cls.nodes.begin(), cls.nodes.end(), [](const ENode& x, const ENode& y) { return x.stamp < y.stamp; });
    for (const auto& n : cls.nodes) memo_.emplace(n, cls.id);

    std::unordered_set<ENode, ENodeHash> seen;
    std::vector<std::pair<ENode, ClassId>> parents;
    for (auto& [n, c] : cls.parents) {
      ENode k = canonicalize(std::move(n));
      if (seen.insert(k).second) parents.emplace_back(std::move(k), find(c));
    }
    cls.parents = std::move(parents);
  }
}

std::vector<ClassId> EGraph::class_ids() const {
  std::vector<ClassId> out;
  out.reserve(live_classes_);
  for (std::size_t i = 0; i < classes_.size(); ++i)
    if (live_[i]) out.push_back(static_cast<ClassId>(i));
  return out;
}

std::size_t EGraph::num_nodes() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i)
    if (live_[i]) n += classes_[i].nodes.size();
  return n;
}

bool EGraph::audit() const {
  std::unordered_map<ENode, ClassId, ENodeHash> seen;
  for (ClassId id : class_ids()) {
    for (const auto& n : classes_[id].nodes) {
      ENode k = canonicalize(n);
      auto [it, inserted] = seen.emplace(k, id);
      if (!inserted && it->second != id) return false;
      auto m = memo_.find(k);
      if (m == memo_.end() || find(m->second) != id) return false;
    }
  }
  return true;
}

std::string describe(const ENode& node) {
  std::ostringstream out;
  out << op_name(node.op());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          out << '[' << format_number(p) << ']';
        } else if constexpr (std::is_same_v<T, std::string>) {
          out << '[' << p << ']';
        } else if constexpr (std::is_same_v<T, Op>) {
          out << '[' << op_name(p) << ']';
        } else if constexpr (std::is_same_v<T, int>) {
          out << '[' << p << ']';
        } else if constexpr (std::is_same_v<T, Permutation>) {
          out << '[';
          for (std::size_t i = 0; i < p.indices.size(); ++i) out << (i ? " " : "") << p.indices[i];
          out << ']';
        } else if constexpr (std::is_same_v<T, Partitioning>) {
          out << '[';
          for (std::size_t i = 0; i < p.lengths.size(); ++i) out << (i ? " " : "") << p.lengths[i];
          out << ']';
        } else if constexpr (std::is_same_v<T, Bindings>) {
          out << '[';
          for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i].var << ' ' << p[i].bound;
          out << ']';
        }
      },
      node.head.payload);
  if (!node.children.empty()) {
    out << '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) out << (i ? ", " : "") << 'c' << node.children[i];
    out << ')';
  }
  return out.str();
}

std::string EGraph::dump() const {
  std::ostringstream out;
  for (ClassId id : class_ids()) {
    out << 'c' << id << ':';
    const auto& nodes = classes_[id].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) out << (i ? " | " : " ") << describe(canonicalize(nodes[i]));
    out << '\n';
  }
  return out.str();
}

}  // namespace cadshrink
