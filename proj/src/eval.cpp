#include "cadshrink/eval.hpp"

#include <cmath>

#include "cadshrink/cost.hpp"
#include "cadshrink/syntax.hpp"

namespace cadshrink {

Value Value::of_number(double v) {
  Value out;
  out.kind = Kind::Number;
  out.number = v;
  return out;
}

Value Value::of_vector(Vec3d v, int dim) {
  Value out;
  out.kind = Kind::Vector;
  out.vec = v;
  out.dim = dim;
  return out;
}

Value Value::of_cad(Expr e) {
  Value out;
  out.kind = Kind::Cad;
  out.cad = std::move(e);
  return out;
}

Value Value::of_list(std::vector<Value> items) {
  Value out;
  out.kind = Kind::List;
  out.items = std::move(items);
  return out;
}

namespace {

[[noreturn]] void type_error(const Expr& e, const char* what) {
  throw EvalError(EvalError::Kind::Type, std::string(what) + " in " + print(e));
}

[[noreturn]] void length_error(const std::string& msg) { throw EvalError(EvalError::Kind::LengthMismatch, msg); }

const Value& expect(const Value& v, Value::Kind kind, const Expr& at, const char* what) {
  if (v.kind != kind) type_error(at, what);
  return v;
}

Expr vector_expr(const Value& v) {
  if (v.dim == 2) return mk::vec2(v.vec[0], v.vec[1]);
  return mk::vec3(v.vec);
}

Value eval(const Expr& e, Env& env);

Value eval_list(const Expr& e, Env& env, const char* what) {
  Value v = eval(e, env);
  if (v.kind != Value::Kind::List) type_error(e, what);
  return v;
}

Vec3d vec3_of(const Value& v, const Expr& at) {
  if (v.kind != Value::Kind::Vector || v.dim != 3) type_error(at, "expected a 3-vector");
  return v.vec;
}

Value affine_value(Op kind, const Vec3d& params, const Value& child, const Expr& at) {
  if (child.kind != Value::Kind::Cad) type_error(at, "affine child must be a cad");
  if (kind == Op::TranslateSpherical) return Value::of_cad(mk::affine(Op::Translate, mk::vec3(round_sig(to_cartesian(params))), child.cad));
  return Value::of_cad(mk::affine(kind, mk::vec3(params), child.cad));
}

void tabulate_rec(const Bindings& bs, std::size_t k, const Expr& body, Env& env, std::vector<Value>& out) {
  if (k == bs.size()) {
    out.push_back(eval(body, env));
    return;
  }
  const std::string& var = bs[k].var;
  auto saved = env.find(var);
  std::optional<double> old;
  if (saved != env.end()) old = saved->second;
  for (int i = 0; i < bs[k].bound; ++i) {
    env[var] = i;
    tabulate_rec(bs, k + 1, body, env, out);
  }
  if (old) {
    env[var] = *old;
  } else {
    env.erase(var);
  }
}

Value eval(const Expr& e, Env& env) {
  switch (e.op()) {
    case Op::Num:
      return Value::of_number(e.num());
    case Op::Var: {
      auto it = env.find(e.name());
      if (it == env.end()) throw EvalError(EvalError::Kind::UnboundVariable, "unbound variable " + e.name());
      return Value::of_number(it->second);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      Value a = eval(e.child(0), env);
      Value b = eval(e.child(1), env);
      if (a.kind != Value::Kind::Number || b.kind != Value::Kind::Number) type_error(e, "arithmetic on non-numbers");
      double r = 0;
      switch (e.op()) {
        case Op::Add: r = a.number + b.number; break;
        case Op::Sub: r = a.number - b.number; break;
        case Op::Mul: r = a.number * b.number; break;
        default:
          if (b.number == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero in " + print(e));
          r = a.number / b.number;
      }
      return Value::of_number(round_sig(r));
    }
    case Op::Vec2:
    case Op::Vec3: {
      Vec3d v{};
      for (std::size_t i = 0; i < e.arity(); ++i) {
        Value c = eval(e.child(i), env);
        if (c.kind != Value::Kind::Number) type_error(e, "vector component must be a number");
        v[i] = c.number;
      }
      return Value::of_vector(v, static_cast<int>(e.arity()));
    }
    case Op::Cuboid:
    case Op::Cylinder:
    case Op::HexPrism: {
      Value p = eval(e.child(0), env);
      int want = e.op() == Op::Cuboid ? 3 : 2;
      if (p.kind != Value::Kind::Vector || p.dim != want) type_error(e, "bad primitive parameters");
      return Value::of_cad(mk::primitive(e.op(), vector_expr(p)));
    }
    case Op::Sphere: {
      Value p = eval(e.child(0), env);
      expect(p, Value::Kind::Number, e, "Sphere radius must be a number");
      return Value::of_cad(mk::sphere(mk::num(p.number)));
    }
    case Op::Translate:
    case Op::Rotate:
    case Op::Scale:
    case Op::TranslateSpherical: {
      Value p = eval(e.child(0), env);
      Value c = eval(e.child(1), env);
      return affine_value(e.op(), vec3_of(p, e), c, e);
    }
    case Op::Union:
    case Op::Difference:
    case Op::Intersection: {
      Value a = eval(e.child(0), env);
      Value b = eval(e.child(1), env);
      if (a.kind != Value::Kind::Cad || b.kind != Value::Kind::Cad) type_error(e, "binop operands must be cads");
      return Value::of_cad(mk::binop(e.op(), a.cad, b.cad));
    }
    case Op::Fold: {
      Value l = eval_list(e.child(0), env, "Fold expects a list");
      if (l.items.empty()) length_error("Fold over an empty list");
      Expr acc;
      for (const auto& item : l.items) {
        if (item.kind != Value::Kind::Cad) type_error(e, "Fold expects a list of cads");
        acc = acc.empty() ? item.cad : mk::binop(e.kind(), acc, item.cad);
      }
      return Value::of_cad(acc);
    }
    case Op::List: {
      std::vector<Value> items;
      items.reserve(e.arity());
      for (const auto& c : e.children()) items.push_back(eval(c, env));
      return Value::of_list(std::move(items));
    }
    case Op::Concat: {
      std::vector<Value> items;
      for (const auto& c : e.children()) {
        Value l = eval_list(c, env, "Concat expects lists");
        for (auto& item : l.items) items.push_back(std::move(item));
      }
      return Value::of_list(std::move(items));
    }
    case Op::Tabulate: {
      std::vector<Value> items;
      tabulate_rec(e.bindings(), 0, e.child(0), env, items);
      return Value::of_list(std::move(items));
    }
    case Op::Map2: {
      Value ps = eval_list(e.child(0), env, "Map2 expects a parameter list");
      Value cs = eval_list(e.child(1), env, "Map2 expects a cad list");
      if (ps.items.size() != cs.items.size())
        length_error("Map2 lists differ in length: " + std::to_string(ps.items.size()) + " vs " +
                     std::to_string(cs.items.size()));
      std::vector<Value> items;
      for (std::size_t i = 0; i < ps.items.size(); ++i)
        items.push_back(affine_value(e.kind(), vec3_of(ps.items[i], e), cs.items[i], e));
      return Value::of_list(std::move(items));
    }
    case Op::Repeat: {
      Value item = eval(e.child(0), env);
      return Value::of_list(std::vector<Value>(static_cast<std::size_t>(e.count()), item));
    }
    case Op::Sort:
    case Op::Unsort: {
      Value l = eval_list(e.child(0), env, "Sort expects a list");
      const auto& p = e.perm().indices;
      if (p.size() != l.items.size())
        length_error("permutation of length " + std::to_string(p.size()) + " applied to list of length " +
                     std::to_string(l.items.size()));
      std::vector<Value> items(l.items.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (e.op() == Op::Sort) {
          items[k] = l.items[static_cast<std::size_t>(p[k])];
        } else {
          items[static_cast<std::size_t>(p[k])] = l.items[k];
        }
      }
      return Value::of_list(std::move(items));
    }
    case Op::Part: {
      Value l = eval_list(e.child(0), env, "Part expects a list");
      const auto& lengths = e.part().lengths;
      if (e.part().total() != l.items.size()) length_error("partitioning does not cover the list");
      std::vector<Value> groups;
      std::size_t at = 0;
      for (int n : lengths) {
        std::vector<Value> g(l.items.begin() + static_cast<long>(at), l.items.begin() + static_cast<long>(at + n));
        groups.push_back(Value::of_list(std::move(g)));
        at += static_cast<std::size_t>(n);
      }
      return Value::of_list(std::move(groups));
    }
    case Op::Unpart: {
      std::vector<Value> lists;
      for (const auto& c : e.children()) lists.push_back(eval_list(c, env, "Unpart expects lists"));
      // A single list of lists is the output of Part; splice it.
      if (lists.size() == 1 && !lists[0].items.empty()) {
        bool nested = true;
        for (const auto& item : lists[0].items) nested = nested && item.kind == Value::Kind::List;
        if (nested) {
          auto inner = std::move(lists[0].items);
          lists = std::move(inner);
        }
      }
      const auto& lengths = e.part().lengths;
      if (lists.size() != lengths.size()) length_error("Unpart: sublist count does not match partitioning");
      std::vector<Value> items;
      for (std::size_t i = 0; i < lists.size(); ++i) {
        if (lists[i].items.size() != static_cast<std::size_t>(lengths[i]))
          length_error("Unpart: sublist " + std::to_string(i) + " has the wrong length");
        for (auto& item : lists[i].items) items.push_back(std::move(item));
      }
      return Value::of_list(std::move(items));
    }
    case Op::Spherical:
    case Op::Unspherical: {
      Vec3d center = vec3_of(eval(e.child(0), env), e);
      Value l = eval_list(e.child(1), env, "expected a vector list");
      if (l.items.size() != static_cast<std::size_t>(e.count())) length_error("count does not match list length");
      std::vector<Value> items;
      for (const auto& item : l.items) {
        Vec3d v = vec3_of(item, e);
        Vec3d r = e.op() == Op::Spherical ? to_spherical(center, v) : to_cartesian(center, v);
        items.push_back(Value::of_vector(round_sig(r), 3));
      }
      return Value::of_list(std::move(items));
    }
    case Op::ClassRef:
      type_error(e, "cannot evaluate an e-class reference");
  }
  type_error(e, "unknown constructor");
}

}  // namespace

Value evaluate(const Expr& e, const Env& env) {
  Env scratch = env;
  return eval(e, scratch);
}

Expr to_expr(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Number:
      return mk::num(v.number);
    case Value::Kind::Vector:
      return vector_expr(v);
    case Value::Kind::Cad:
      return v.cad;
    case Value::Kind::List: {
      std::vector<Expr> items;
      for (const auto& item : v.items) items.push_back(to_expr(item));
      return mk::list(std::move(items));
    }
  }
  return {};
}

Expr eval_to_core(const Expr& e) { return to_expr(evaluate(e)); }

double eval_number(const Expr& e, const Env& env) {
  Value v = evaluate(e, env);
  if (v.kind != Value::Kind::Number) type_error(e, "expected a number");
  return v.number;
}

Cost node_cost(Op op) { return is_inverse(op) || op == Op::ClassRef ? kInfiniteCost : 1; }

Cost cost(const Expr& e) {
  Cost c = node_cost(e.op());
  for (const auto& child : e.children()) c = add_cost(c, cost(child));
  return c;
}

}  // namespace cadshrink
