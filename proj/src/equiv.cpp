#include "cadshrink/equiv.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cadshrink/syntax.hpp"

namespace cadshrink {
namespace {

using Mat4 = Eigen::Matrix4d;

struct Canon {
  enum class Kind { Leaf, Union, Intersection, Difference };
  Kind kind = Kind::Leaf;
  Op primitive = Op::Cuboid;
  Mat4 m = Mat4::Identity();
  // Union/Intersection: all members. Difference: front is the minuend.
  std::vector<std::shared_ptr<const Canon>> parts;
};
using CanonPtr = std::shared_ptr<const Canon>;

double literal(const Expr& e) {
  if (e.op() != Op::Num) throw std::invalid_argument("semantic_equiv expects literal parameters, got " + print(e));
  return e.num();
}

Vec3d vec_literal(const Expr& e) {
  if (e.op() != Op::Vec3) throw std::invalid_argument("expected a 3-vector, got " + print(e));
  return {literal(e.child(0)), literal(e.child(1)), literal(e.child(2))};
}

Mat4 affine_matrix(Op kind, const Vec3d& p, double eps) {
  Mat4 m = Mat4::Identity();
  switch (kind) {
    case Op::Translate:
      m(0, 3) = p[0];
      m(1, 3) = p[1];
      m(2, 3) = p[2];
      break;
    case Op::Scale:
      for (int i = 0; i < 3; ++i) {
        if (p[i] == 0.0 || std::abs(p[i]) < eps)
          throw DegenerateScale("Scale component " + format_number(p[i]) + " is not invertible");
        m(i, i) = p[i];
      }
      break;
    case Op::Rotate: {
      auto rx = Mat4::Identity().eval();
      auto ry = rx, rz = rx;
      double cx = cos_deg(p[0]), sx = sin_deg(p[0]);
      double cy = cos_deg(p[1]), sy = sin_deg(p[1]);
      double cz = cos_deg(p[2]), sz = sin_deg(p[2]);
      rx(1, 1) = cx; rx(1, 2) = -sx; rx(2, 1) = sx; rx(2, 2) = cx;
      ry(0, 0) = cy; ry(0, 2) = sy; ry(2, 0) = -sy; ry(2, 2) = cy;
      rz(0, 0) = cz; rz(0, 1) = -sz; rz(1, 0) = sz; rz(1, 1) = cz;
      m = rz * ry * rx;
      break;
    }
    default:
      throw std::invalid_argument("not a core affine: " + std::string(op_name(kind)));
  }
  return m;
}

Mat4 primitive_scale(const Expr& e) {
  Mat4 m = Mat4::Identity();
  const Expr& p = e.child(0);
  switch (e.op()) {
    case Op::Cuboid: {
      Vec3d d = vec_literal(p);
      for (int i = 0; i < 3; ++i) m(i, i) = d[i];
      break;
    }
    case Op::Sphere: {
      double r = literal(p);
      for (int i = 0; i < 3; ++i) m(i, i) = r;
      break;
    }
    default: {  // Cylinder, HexPrism: [h, r]
      if (p.op() != Op::Vec2) throw std::invalid_argument("expected [height, radius] in " + print(e));
      double h = literal(p.child(0)), r = literal(p.child(1));
      m(0, 0) = r;
      m(1, 1) = r;
      m(2, 2) = h;
    }
  }
  return m;
}

CanonPtr canon(const Expr& e, const Mat4& acc, double eps) {
  if (is_primitive(e.op())) {
    auto c = std::make_shared<Canon>();
    c->kind = Canon::Kind::Leaf;
    c->primitive = e.op();
    c->m = acc * primitive_scale(e);
    return c;
  }
  if (e.op() == Op::Translate || e.op() == Op::Rotate || e.op() == Op::Scale) {
    return canon(e.child(1), acc * affine_matrix(e.op(), vec_literal(e.child(0)), eps), eps);
  }
  if (e.op() == Op::Union || e.op() == Op::Intersection) {
    auto c = std::make_shared<Canon>();
    c->kind = e.op() == Op::Union ? Canon::Kind::Union : Canon::Kind::Intersection;
    for (const auto& child : e.children()) {
      CanonPtr k = canon(child, acc, eps);
      if (k->kind == c->kind) {
        c->parts.insert(c->parts.end(), k->parts.begin(), k->parts.end());
      } else {
        c->parts.push_back(k);
      }
    }
    return c;
  }
  if (e.op() == Op::Difference) {
    auto c = std::make_shared<Canon>();
    c->kind = Canon::Kind::Difference;
    CanonPtr lhs = canon(e.child(0), acc, eps);
    CanonPtr rhs = canon(e.child(1), acc, eps);
    // (A - B) - C is A - (B u C).
    if (lhs->kind == Canon::Kind::Difference) {
      c->parts = lhs->parts;
    } else {
      c->parts.push_back(lhs);
    }
    if (rhs->kind == Canon::Kind::Union) {
      c->parts.insert(c->parts.end(), rhs->parts.begin(), rhs->parts.end());
    } else {
      c->parts.push_back(rhs);
    }
    return c;
  }
  throw std::invalid_argument("semantic_equiv expects core programs, got " + std::string(op_name(e.op())));
}

// Deterministic order for AC multisets.
int compare(const Canon& a, const Canon& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Canon::Kind::Leaf) {
    if (a.primitive != b.primitive) return a.primitive < b.primitive ? -1 : 1;
    for (int i = 0; i < 16; ++i) {
      double x = round_sig(a.m.data()[i], 9), y = round_sig(b.m.data()[i], 9);
      if (x != y) return x < y ? -1 : 1;
    }
    return 0;
  }
  if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    if (int c = compare(*a.parts[i], *b.parts[i]); c != 0) return c;
  return 0;
}

CanonPtr normalize(const CanonPtr& c) {
  if (c->kind == Canon::Kind::Leaf) return c;
  auto out = std::make_shared<Canon>(*c);
  for (auto& p : out->parts) p = normalize(p);
  auto first = out->parts.begin();
  if (out->kind == Canon::Kind::Difference) ++first;  // the minuend stays put
  std::sort(first, out->parts.end(), [](const CanonPtr& x, const CanonPtr& y) { return compare(*x, *y) < 0; });
  return out;
}

bool close(const Canon& a, const Canon& b, double eps);

bool multiset_close(const std::vector<CanonPtr>& a, const std::vector<CanonPtr>& b, std::size_t from, double eps) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = from; i < a.size(); ++i) {
    bool found = false;
    for (std::size_t j = from; j < b.size(); ++j) {
      if (!used[j] && close(*a[i], *b[j], eps)) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool close(const Canon& a, const Canon& b, double eps) {
  if (a.kind != b.kind) return false;
  if (a.kind == Canon::Kind::Leaf) {
    if (a.primitive != b.primitive) return false;
    return ((a.m - b.m).cwiseAbs().maxCoeff() <= eps);
  }
  if (a.parts.size() != b.parts.size()) return false;
  if (a.kind == Canon::Kind::Difference) {
    if (!close(*a.parts[0], *b.parts[0], eps)) return false;
    return multiset_close(a.parts, b.parts, 1, eps);
  }
  return multiset_close(a.parts, b.parts, 0, eps);
}

bool equiv_values(const Expr& a, const Expr& b, double eps) {
  if (a.op() == Op::List || b.op() == Op::List) {
    if (a.op() != b.op() || a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!equiv_values(a.child(i), b.child(i), eps)) return false;
    return true;
  }
  if (a.op() == Op::Num || b.op() == Op::Num) {
    return a.op() == b.op() && std::abs(a.num() - b.num()) <= eps;
  }
  if (a.op() == Op::Vec2 || a.op() == Op::Vec3 || b.op() == Op::Vec2 || b.op() == Op::Vec3) {
    if (a.op() != b.op()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (std::abs(literal(a.child(i)) - literal(b.child(i))) > eps) return false;
    return true;
  }
  CanonPtr ca = normalize(canon(a, Mat4::Identity(), eps));
  CanonPtr cb = normalize(canon(b, Mat4::Identity(), eps));
  return close(*ca, *cb, eps);
}

}  // namespace

bool semantic_equiv(const Expr& a, const Expr& b, double eps) { return equiv_values(a, b, eps); }

}  // namespace cadshrink
