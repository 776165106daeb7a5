#include "cadshrink/syntax.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

namespace cadshrink {

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '?'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?' || c == '\'' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_program() {
    skip_ws();
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after expression");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, ParseError::Kind kind = ParseError::Kind::Syntax) const {
    fail_at(pos_, msg, kind);
  }

  [[noreturn]] void fail_at(std::size_t at, const std::string& msg,
                            ParseError::Kind kind = ParseError::Kind::Syntax) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(kind, line, col, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {  // line comment
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool at_close() { return peek() == ')'; }

  // An atom runs until whitespace, a bracket, a paren, or a comma.
  std::pair<std::string_view, std::size_t> read_atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' || c == ']' || c == ',')
        break;
      ++pos_;
    }
    if (start == pos_) fail("expected an atom");
    return {text_.substr(start, pos_ - start), start};
  }

  int parse_int(const char* what) {
    auto [atom, at] = read_atom();
    std::string s(atom);
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) fail_at(at, std::string("expected integer ") + what);
    return static_cast<int>(v);
  }

  int parse_positive(const char* what) {
    std::size_t at = pos_;
    int v = parse_int(what);
    if (v < 1) fail_at(at, std::string(what) + " must be positive", ParseError::Kind::Arity);
    return v;
  }

  std::vector<int> parse_int_group() {
    expect('(');
    std::vector<int> out;
    while (!at_close()) {
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      out.push_back(parse_int("in index list"));
    }
    expect(')');
    return out;
  }

  Op parse_kind(bool (*pred)(Op), const char* what) {
    auto [atom, at] = read_atom();
    auto op = op_from_name(atom);
    if (!op || !pred(*op)) fail_at(at, std::string("expected ") + what + ", got '" + std::string(atom) + "'");
    return *op;
  }

  Expr parse_expr() {
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '[') return parse_vector();
    if (c == '(') return parse_form();
    if (c == ')' || c == ']' || c == ',') fail(std::string("unexpected '") + c + "'");
    auto [atom, at] = read_atom();
    if (atom.front() == '?') return mk::var(std::string(atom));
    return parse_infix(atom, at);
  }

  Expr parse_vector() {
    std::size_t open = pos_;
    ++pos_;  // '['
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (pos_ >= text_.size() || text_[pos_] != ']') fail_at(open, "unterminated vector");
    std::string_view body = text_.substr(start, pos_ - start);
    ++pos_;  // ']'

    // Split at top-level commas; without commas, at top-level whitespace.
    bool has_comma = false;
    depth = 0;
    for (char c : body) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) has_comma = true;
    }
    std::vector<std::pair<std::string_view, std::size_t>> parts;
    std::size_t seg = 0;
    depth = 0;
    auto flush = [&](std::size_t end) {
      std::size_t b = seg, e = end;
      while (b < e && std::isspace(static_cast<unsigned char>(body[b]))) ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(body[e - 1]))) --e;
      if (b < e) {
        parts.emplace_back(body.substr(b, e - b), start + b);
      } else if (has_comma) {
        fail_at(start + seg, "empty vector component", ParseError::Kind::Arity);
      }
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
      char c = body[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      bool split = depth == 0 && (has_comma ? c == ',' : std::isspace(static_cast<unsigned char>(c)) != 0);
      if (split) {
        flush(i);
        seg = i + 1;
      }
    }
    flush(body.size());
    std::vector<Expr> comps;
    for (auto [text, at] : parts) comps.push_back(parse_infix(text, at));
    if (comps.size() == 3) return mk::vec3(comps[0], comps[1], comps[2]);
    if (comps.size() == 2) return mk::vec2(comps[0], comps[1]);
    fail_at(open, "vector must have 2 or 3 components, got " + std::to_string(comps.size()),
            ParseError::Kind::Arity);
  }

  Expr parse_form() {
    std::size_t open = pos_;
    ++pos_;  // '('
    auto [head, head_at] = read_atom();
    Expr result;
    if (head == "+" || head == "-" || head == "*" || head == "/") {
      Op op = *op_from_name(head);
      Expr lhs = parse_expr();
      Expr rhs = parse_expr();
      result = mk::arith(op, lhs, rhs);
      while (!at_close()) result = mk::arith(op, result, parse_expr());
      expect(')');
      return result;
    }
    auto op = op_from_name(head);
    if (!op || *op == Op::Num || *op == Op::Var || *op == Op::Vec2 || *op == Op::Vec3 || *op == Op::ClassRef) {
      fail_at(head_at, "unknown operator '" + std::string(head) + "'", ParseError::Kind::UnknownOperator);
    }
    switch (*op) {
      case Op::Cuboid:
      case Op::Sphere:
      case Op::Cylinder:
      case Op::HexPrism: {
        Expr params = parse_expr();
        if (*op == Op::Cuboid && params.op() != Op::Vec3 && params.op() != Op::Var)
          fail_at(head_at, "Cuboid takes a 3-vector", ParseError::Kind::Arity);
        if ((*op == Op::Cylinder || *op == Op::HexPrism) && params.op() != Op::Vec2 && params.op() != Op::Var)
          fail_at(head_at, std::string(op_name(*op)) + " takes a 2-vector [height, radius]", ParseError::Kind::Arity);
        if (*op == Op::Sphere && (params.op() == Op::Vec2 || params.op() == Op::Vec3))
          fail_at(head_at, "Sphere takes a scalar radius", ParseError::Kind::Arity);
        result = mk::primitive(*op, params);
        break;
      }
      case Op::Translate:
      case Op::Rotate:
      case Op::Scale:
      case Op::TranslateSpherical: {
        Expr params = parse_expr();
        if (params.op() == Op::Vec2) fail_at(head_at, "affine parameters must be a 3-vector", ParseError::Kind::Arity);
        Expr child = parse_expr();
        result = mk::affine(*op, params, child);
        break;
      }
      case Op::Union:
      case Op::Difference:
      case Op::Intersection: {
        Expr acc = parse_expr();
        if (at_close()) fail_at(head_at, std::string(op_name(*op)) + " needs at least two operands", ParseError::Kind::Arity);
        while (!at_close()) acc = mk::binop(*op, acc, parse_expr());
        result = acc;
        break;
      }
      case Op::Fold: {
        Op kind = parse_kind(is_binop, "a binop");
        result = mk::fold(kind, parse_expr());
        break;
      }
      case Op::List:
      case Op::Concat: {
        std::vector<Expr> items;
        while (!at_close()) items.push_back(parse_expr());
        if (items.empty()) fail_at(head_at, std::string(op_name(*op)) + " must be non-empty", ParseError::Kind::Arity);
        result = *op == Op::List ? mk::list(std::move(items)) : mk::concat(std::move(items));
        break;
      }
      case Op::Tabulate: {
        Bindings bindings;
        while (true) {
          std::size_t save = pos_;
          if (peek() != '(') break;
          ++pos_;
          skip_ws();
          if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
            pos_ = save;
            break;
          }
          auto [name, name_at] = read_atom();
          if (op_from_name(name)) {
            pos_ = save;
            break;
          }
          int bound = parse_positive("Tabulate bound");
          expect(')');
          bindings.push_back(Binding{std::string(name), bound});
        }
        if (bindings.empty()) fail_at(head_at, "Tabulate needs at least one (var bound) binding", ParseError::Kind::Arity);
        result = mk::tabulate(std::move(bindings), parse_expr());
        break;
      }
      case Op::Map2: {
        Op kind = parse_kind(is_affine, "an affine kind");
        Expr params = parse_expr();
        Expr cads = parse_expr();
        result = mk::map2(kind, params, cads);
        break;
      }
      case Op::Repeat: {
        int n = parse_positive("Repeat count");
        result = mk::repeat(n, parse_expr());
        break;
      }
      case Op::Sort:
      case Op::Unsort: {
        std::size_t at = pos_;
        Permutation p{parse_int_group()};
        if (!p.valid()) fail_at(at, "not a permutation of 0..n-1", ParseError::Kind::Arity);
        Expr l = parse_expr();
        result = *op == Op::Sort ? mk::sort(std::move(p), l) : mk::unsort(std::move(p), l);
        break;
      }
      case Op::Part:
      case Op::Unpart: {
        std::size_t at = pos_;
        Partitioning p{parse_int_group()};
        if (!p.valid()) fail_at(at, "partitioning lengths must be positive", ParseError::Kind::Arity);
        if (*op == Op::Part) {
          result = mk::part(std::move(p), parse_expr());
        } else {
          std::vector<Expr> lists;
          while (!at_close()) lists.push_back(parse_expr());
          if (lists.empty()) fail_at(head_at, "Unpart needs at least one list", ParseError::Kind::Arity);
          result = mk::unpart(std::move(p), std::move(lists));
        }
        break;
      }
      case Op::Spherical:
      case Op::Unspherical: {
        int n = parse_positive("count");
        Expr center = parse_expr();
        if (center.op() == Op::Vec2) fail_at(head_at, "center must be a 3-vector", ParseError::Kind::Arity);
        Expr l = parse_expr();
        result = *op == Op::Spherical ? mk::spherical(n, center, l) : mk::unspherical(n, center, l);
        break;
      }
      default:
        fail_at(head_at, "unknown operator '" + std::string(head) + "'", ParseError::Kind::UnknownOperator);
    }
    if (peek() == '\0') fail("unexpected end of input");
    if (!at_close()) fail("too many operands for '" + std::string(head) + "'", ParseError::Kind::Arity);
    expect(')');
    (void)open;
    return result;
  }

  // Infix arithmetic over a standalone slice of the input.
  class Infix {
   public:
    Infix(const Parser& owner, std::string_view s, std::size_t base) : owner_(owner), s_(s), base_(base) {}

    Expr run() {
      Expr e = sum();
      ws();
      if (i_ != s_.size()) owner_.fail_at(base_ + i_, "unexpected character in arithmetic");
      return e;
    }

   private:
    const Parser& owner_;
    std::string_view s_;
    std::size_t base_;
    std::size_t i_ = 0;

    void ws() {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    Expr sum() {
      Expr acc = product();
      while (true) {
        ws();
        if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) {
          Op op = s_[i_] == '+' ? Op::Add : Op::Sub;
          ++i_;
          acc = mk::arith(op, acc, product());
        } else {
          return acc;
        }
      }
    }

    Expr product() {
      Expr acc = unary();
      while (true) {
        ws();
        if (i_ < s_.size() && (s_[i_] == '*' || s_[i_] == '/')) {
          Op op = s_[i_] == '*' ? Op::Mul : Op::Div;
          ++i_;
          acc = mk::arith(op, acc, unary());
        } else {
          return acc;
        }
      }
    }

    Expr unary() {
      ws();
      if (i_ < s_.size() && s_[i_] == '-') {
        ++i_;
        Expr inner = unary();
        if (inner.op() == Op::Num) return mk::num(-inner.num());
        return mk::arith(Op::Mul, mk::num(-1), inner);
      }
      if (i_ < s_.size() && s_[i_] == '+') {
        ++i_;
        return unary();
      }
      return primary();
    }

    Expr primary() {
      ws();
      if (i_ >= s_.size()) owner_.fail_at(base_ + i_, "expected a number or variable");
      char c = s_[i_];
      if (c == '(') {
        ++i_;
        Expr e = sum();
        ws();
        if (i_ >= s_.size() || s_[i_] != ')') owner_.fail_at(base_ + i_, "expected ')'");
        ++i_;
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::string buf(s_.substr(i_));
        char* end = nullptr;
        double v = std::strtod(buf.c_str(), &end);
        std::size_t used = static_cast<std::size_t>(end - buf.c_str());
        if (used == 0) owner_.fail_at(base_ + i_, "malformed number");
        i_ += used;
        return mk::num(v);
      }
      if (ident_start(c)) {
        std::size_t b = i_;
        while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
        return mk::var(std::string(s_.substr(b, i_ - b)));
      }
      owner_.fail_at(base_ + i_, std::string("unexpected '") + c + "'");
    }
  };

  Expr parse_infix(std::string_view s, std::size_t at) const { return Infix(*this, s, at).run(); }
};

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    default:
      return 3;
  }
}

void print_infix(const Expr& e, std::string& out, int parent_prec, bool right_operand);
void print_sexp(const Expr& e, std::string& out);

void print_atom_in_infix(const Expr& e, std::string& out, bool right_operand) {
  if (e.op() == Op::Num) {
    std::string s = format_number(e.num());
    if (right_operand && e.num() < 0) {
      out += "(" + s + ")";
    } else {
      out += s;
    }
  } else if (e.op() == Op::Var) {
    out += e.name();
  } else {
    // Non-arithmetic inside a vector slot: fall back to the s-expression form.
    print_sexp(e, out);
  }
}

void print_infix(const Expr& e, std::string& out, int parent_prec, bool right_operand) {
  if (!is_arith(e.op())) {
    print_atom_in_infix(e, out, right_operand);
    return;
  }
  int prec = precedence(e.op());
  bool parens = prec < parent_prec || (prec == parent_prec && right_operand);
  if (parens) out += '(';
  print_infix(e.child(0), out, prec, false);
  out += op_name(e.op());
  print_infix(e.child(1), out, prec, true);
  if (parens) out += ')';
}

void print_vector(const Expr& e, std::string& out) {
  out += '[';
  for (std::size_t i = 0; i < e.arity(); ++i) {
    if (i) out += ", ";
    print_infix(e.child(i), out, 0, false);
  }
  out += ']';
}

void print_indices(const std::vector<int>& xs, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  out += ')';
}

void print_sexp(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Num:
      out += format_number(e.num());
      return;
    case Op::Var:
      out += e.name();
      return;
    case Op::ClassRef:
      out += '#';
      out += std::to_string(e.count());
      return;
    case Op::Vec2:
    case Op::Vec3:
      print_vector(e, out);
      return;
    default:
      break;
  }
  out += '(';
  out += op_name(e.op());
  switch (e.op()) {
    case Op::Fold:
    case Op::Map2:
      out += ' ';
      out += op_name(e.kind());
      break;
    case Op::Tabulate:
      for (const auto& b : e.bindings()) out += " (" + b.var + " " + std::to_string(b.bound) + ")";
      break;
    case Op::Repeat:
    case Op::Spherical:
    case Op::Unspherical:
      out += ' ';
      out += std::to_string(e.count());
      break;
    case Op::Sort:
    case Op::Unsort:
      out += ' ';
      print_indices(e.perm().indices, out);
      break;
    case Op::Part:
    case Op::Unpart:
      out += ' ';
      print_indices(e.part().lengths, out);
      break;
    default:
      break;
  }
  for (const auto& c : e.children()) {
    out += ' ';
    print_sexp(c, out);
  }
  out += ')';
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_program(); }

std::string print(const Expr& e) {
  std::string out;
  print_sexp(e, out);
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  // Shortest round-trip text, fixed or scientific, whichever is shorter.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace cadshrink
