#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cadshrink/expr.hpp"

namespace cadshrink {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Arity, UnknownOperator };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

/// Reads one parenthesised program. Variadic binops desugar left-associatively;
/// vectors are `[a, b, c]` with or without commas, components in infix form.
Expr parse(std::string_view text);

/// Canonical text form; `parse(print(e)) == e`.
std::string print(const Expr& e);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace cadshrink
