#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cadshrink/expr.hpp"

namespace cadshrink {

class EvalError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, LengthMismatch, DivisionByZero, Type };
  EvalError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Runtime value of the big-step semantics.
struct Value {
  enum class Kind { Number, Vector, Cad, List };
  Kind kind = Kind::Number;
  double number = 0.0;
  Vec3d vec{};
  int dim = 0;              // 2 or 3 for vectors
  Expr cad;                 // core form
  std::vector<Value> items;

  static Value of_number(double v);
  static Value of_vector(Vec3d v, int dim);
  static Value of_cad(Expr e);
  static Value of_list(std::vector<Value> items);
};

using Env = std::map<std::string, double>;

Value evaluate(const Expr& e, const Env& env = {});

/// Back to syntax: cads as core trees, lists as (List ...), vectors as literals.
Expr to_expr(const Value& v);

/// Reduces a closed program to Core Caddy (or a List of results).
Expr eval_to_core(const Expr& e);

/// Numeric value of a closed arithmetic term.
double eval_number(const Expr& e, const Env& env = {});

}  // namespace cadshrink
