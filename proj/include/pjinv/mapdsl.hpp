#pragma once

// A small expression language for square mappings R^n -> R^n.
//
//   mapping := [ "vars" ident {"," ident} ";" ] "(" expr {"," expr} ")"
//   expr    := term {("+"|"-") term}
//   term    := factor {("*"|"/") factor}
//   factor  := ["-"] power
//   power   := primary {"^" integer}
//   primary := number | ident | func "(" expr ")" | "(" expr ")"
//   func    := abs | cbrt | sin | cos | exp | sqrt | sign
//
// Without a vars clause the variables are x, y, z, w (or x1..xn for n > 4),
// taking as many as there are components.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pjinv/error.hpp"
#include "pjinv/finite_difference.hpp"
#include "pjinv/linalg.hpp"

namespace pjinv::dsl {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::vector<std::string> expected, const std::string& found)
      : Error(ErrorKind::syntax, compose(line, column, expected, found)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string compose(int line, int column, const std::vector<std::string>& expected,
                             const std::string& found) {
    std::string msg = "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": expected ";
    if (expected.size() > 1) msg += "one of ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += "'" + expected[i] + "'";
    }
    return msg + "; found " + found;
  }

  int line_;
  int column_;
  std::vector<std::string> expected_;
};

enum class Func { abs, cbrt, sin, cos, exp, sqrt, sign };

inline std::optional<Func> func_from_name(std::string_view name) {
  if (name == "abs") return Func::abs;
  if (name == "cbrt") return Func::cbrt;
  if (name == "sin") return Func::sin;
  if (name == "cos") return Func::cos;
  if (name == "exp") return Func::exp;
  if (name == "sqrt") return Func::sqrt;
  if (name == "sign") return Func::sign;
  return std::nullopt;
}

inline std::string_view func_name(Func f) {
  switch (f) {
    case Func::abs: return "abs";
    case Func::cbrt: return "cbrt";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
    case Func::sign: return "sign";
  }
  return "?";
}

enum class NodeKind { number, variable, neg, add, sub, mul, div, pow, call };

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;  // number literal
  int index = 0;       // variable index, integer exponent, or Func
  int lhs = -1;
  int rhs = -1;
};

/// Parsed mapping: one expression tree per component over ordered variables.
class MappingExpr {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& components() const { return roots_; }
  const std::vector<std::string>& variables() const { return variables_; }
  Eigen::Index arity() const { return static_cast<Eigen::Index>(roots_.size()); }

  Vector evaluate(const Vector& x) const {
    if (x.size() != arity())
      fail(ErrorKind::invalid_input, "eval_mapping: expected " + std::to_string(arity()) + " coordinates, got " +
                                         std::to_string(x.size()));
    Vector out(arity());
    for (Eigen::Index c = 0; c < arity(); ++c) {
      const double v = eval_node(roots_[static_cast<std::size_t>(c)], x, static_cast<int>(c));
      if (!std::isfinite(v))
        fail(ErrorKind::evaluation, "component " + std::to_string(c + 1) + ": non-finite result");
      out(c) = v;
    }
    return out;
  }

  /// Canonical form; always carries the vars clause.
  std::string print() const {
    std::string out = "vars ";
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (i) out += ",";
      out += variables_[i];
    }
    out += "; (";
    for (std::size_t c = 0; c < roots_.size(); ++c) {
      if (c) out += ", ";
      out += print_node(roots_[c], 0);
    }
    return out + ")";
  }

  bool structurally_equal(const MappingExpr& other) const {
    if (variables_ != other.variables_ || roots_.size() != other.roots_.size()) return false;
    for (std::size_t c = 0; c < roots_.size(); ++c)
      if (!same(roots_[c], other, other.roots_[c])) return false;
    return true;
  }

 private:
  friend class Parser;

  double eval_node(int id, const Vector& x, int component) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    auto fault = [&](const char* what) -> double {
      fail(ErrorKind::evaluation, "component " + std::to_string(component + 1) + ": " + what);
    };
    switch (n.kind) {
      case NodeKind::number: return n.value;
      case NodeKind::variable: return x(n.index);
      case NodeKind::neg: return -eval_node(n.lhs, x, component);
      case NodeKind::add: return eval_node(n.lhs, x, component) + eval_node(n.rhs, x, component);
      case NodeKind::sub: return eval_node(n.lhs, x, component) - eval_node(n.rhs, x, component);
      case NodeKind::mul: return eval_node(n.lhs, x, component) * eval_node(n.rhs, x, component);
      case NodeKind::div: {
        const double num = eval_node(n.lhs, x, component);
        const double den = eval_node(n.rhs, x, component);
        if (den == 0.0) return fault("division by zero");
        return num / den;
      }
      case NodeKind::pow: {
        const double base = eval_node(n.lhs, x, component);
        if (n.index == 0) return 1.0;
        return std::pow(base, static_cast<double>(n.index));
      }
      case NodeKind::call: {
        const double a = eval_node(n.lhs, x, component);
        switch (static_cast<Func>(n.index)) {
          case Func::abs: return std::abs(a);
          case Func::cbrt: return std::cbrt(a);
          case Func::sin: return std::sin(a);
          case Func::cos: return std::cos(a);
          case Func::exp: {
            const double e = std::exp(a);
            if (!std::isfinite(e)) return fault("exp overflow");
            return e;
          }
          case Func::sqrt:
            if (a < 0.0) return fault("sqrt of negative argument");
            return std::sqrt(a);
          case Func::sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
        }
      }
    }
    return fault("corrupt expression");
  }

  static int precedence(NodeKind k) {
    switch (k) {
      case NodeKind::add:
      case NodeKind::sub: return 1;
      case NodeKind::mul:
      case NodeKind::div: return 2;
      case NodeKind::neg: return 3;
      case NodeKind::pow: return 4;
      default: return 5;
    }
  }

  static std::string format_number(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof buf, "%.*g", prec, v);
      if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
  }

  std::string print_node(int id, int required) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    std::string s;
    switch (n.kind) {
      case NodeKind::number: s = format_number(n.value); break;
      case NodeKind::variable: s = variables_[static_cast<std::size_t>(n.index)]; break;
      case NodeKind::neg: s = "-" + print_node(n.lhs, 4); break;
      case NodeKind::add: s = print_node(n.lhs, 1) + " + " + print_node(n.rhs, 2); break;
      case NodeKind::sub: s = print_node(n.lhs, 1) + " - " + print_node(n.rhs, 2); break;
      case NodeKind::mul: s = print_node(n.lhs, 2) + "*" + print_node(n.rhs, 3); break;
      case NodeKind::div: s = print_node(n.lhs, 2) + "/" + print_node(n.rhs, 3); break;
      case NodeKind::pow: s = print_node(n.lhs, 4) + "^" + std::to_string(n.index); break;
      case NodeKind::call:
        s = std::string(func_name(static_cast<Func>(n.index))) + "(" + print_node(n.lhs, 0) + ")";
        break;
    }
    if (precedence(n.kind) < required) return "(" + s + ")";
    return s;
  }

  bool same(int a, const MappingExpr& other, int b) const {
    const Node& x = nodes_[static_cast<std::size_t>(a)];
    const Node& y = other.nodes_[static_cast<std::size_t>(b)];
    if (x.kind != y.kind) return false;
    if (x.kind == NodeKind::number) return x.value == y.value;
    if (x.index != y.index) return false;
    if ((x.lhs < 0) != (y.lhs < 0) || (x.rhs < 0) != (y.rhs < 0)) return false;
    if (x.lhs >= 0 && !same(x.lhs, other, y.lhs)) return false;
    if (x.rhs >= 0 && !same(x.rhs, other, y.rhs)) return false;
    return true;
  }

  std::vector<Node> nodes_;
  std::vector<int> roots_;
  std::vector<std::string> variables_;
};

inline std::vector<std::string> default_variables(std::size_t n) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(n <= 4 ? names[i] : "x" + std::to_string(i + 1));
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  MappingExpr parse() {
    std::optional<std::vector<std::string>> declared;
    if (tok_.kind == Tok::ident && tok_.text == "vars") {
      advance();
      declared.emplace();
      declared->push_back(expect_ident());
      while (tok_.kind == Tok::comma) {
        advance();
        declared->push_back(expect_ident());
      }
      expect(Tok::semicolon, {";", ","});
    }
    expect(Tok::lparen, {"("});
    expr_.roots_.push_back(parse_expr());
    while (tok_.kind == Tok::comma) {
      advance();
      expr_.roots_.push_back(parse_expr());
    }
    expect(Tok::rparen, {")", ",", "+", "-", "*", "/", "^"});
    if (tok_.kind != Tok::end) error({"end of input"});

    const std::size_t arity = expr_.roots_.size();
    if (declared) {
      if (declared->size() != arity)
        fail(ErrorKind::arity_mismatch, "arity mismatch: " + std::to_string(declared->size()) + " variables but " +
                                            std::to_string(arity) + " components (square mappings only)");
      expr_.variables_ = *declared;
    } else {
      expr_.variables_ = default_variables(arity);
    }
    for (std::size_t i = 0; i < expr_.variables_.size(); ++i)
      for (std::size_t j = i + 1; j < expr_.variables_.size(); ++j)
        if (expr_.variables_[i] == expr_.variables_[j])
          fail(ErrorKind::invalid_input, "duplicate variable '" + expr_.variables_[i] + "'");
    for (const auto& ref : refs_) {
      int found = -1;
      for (std::size_t i = 0; i < expr_.variables_.size(); ++i)
        if (expr_.variables_[i] == ref.name) found = static_cast<int>(i);
      if (found < 0)
        fail(ErrorKind::unknown_identifier, "unknown identifier '" + ref.name + "' at line " +
                                                std::to_string(ref.line) + ", column " + std::to_string(ref.column));
      expr_.nodes_[static_cast<std::size_t>(ref.node)].index = found;
    }
    return std::move(expr_);
  }

 private:
  enum class Tok { number, ident, lparen, rparen, comma, semicolon, plus, minus, star, slash, caret, end, bad };

  struct Token {
    Tok kind = Tok::end;
    std::string text;
    double value = 0.0;
    int line = 1;
    int column = 1;
  };

  struct VarRef {
    std::string name;
    int node;
    int line;
    int column;
  };

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.column = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
    };
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case ',': return single(Tok::comma);
      case ';': return single(Tok::semicolon);
      case '+': return single(Tok::plus);
      case '-': return single(Tok::minus);
      case '*': return single(Tok::star);
      case '/': return single(Tok::slash);
      case '^': return single(Tok::caret);
      default: break;
    }
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          pos_ = p;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
      }
      tok_.text = std::string(src_.substr(start, pos_ - start));
      char* end = nullptr;
      tok_.value = std::strtod(tok_.text.c_str(), &end);
      tok_.kind = (end && *end == '\0') ? Tok::number : Tok::bad;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      tok_.kind = Tok::ident;
    } else {
      ++pos_;
      tok_.text = std::string(1, c);
      tok_.kind = Tok::bad;
    }
    col_ += static_cast<int>(pos_ - start);
  }

  [[noreturn]] void error(std::vector<std::string> expected) const {
    const std::string found = tok_.kind == Tok::end ? "end of input" : "'" + tok_.text + "'";
    throw SyntaxError(tok_.line, tok_.column, std::move(expected), found);
  }

  void expect(Tok k, std::vector<std::string> expected) {
    if (tok_.kind != k) error(std::move(expected));
    advance();
  }

  std::string expect_ident() {
    if (tok_.kind != Tok::ident) error({"identifier"});
    std::string s = tok_.text;
    advance();
    return s;
  }

  int add(Node n) {
    expr_.nodes_.push_back(n);
    return static_cast<int>(expr_.nodes_.size() - 1);
  }

  int parse_expr() {
    int lhs = parse_term();
    while (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
      const NodeKind k = tok_.kind == Tok::plus ? NodeKind::add : NodeKind::sub;
      advance();
      const int rhs = parse_term();
      lhs = add(Node{k, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_factor();
    while (tok_.kind == Tok::star || tok_.kind == Tok::slash) {
      const NodeKind k = tok_.kind == Tok::star ? NodeKind::mul : NodeKind::div;
      advance();
      const int rhs = parse_factor();
      lhs = add(Node{k, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_factor() {
    if (tok_.kind == Tok::minus) {
      advance();
      const int operand = parse_power();
      return add(Node{NodeKind::neg, 0.0, 0, operand, -1});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    while (tok_.kind == Tok::caret) {
      advance();
      if (tok_.kind != Tok::number || tok_.text.find_first_not_of("0123456789") != std::string::npos)
        error({"integer"});
      const int exponent = std::atoi(tok_.text.c_str());
      advance();
      base = add(Node{NodeKind::pow, 0.0, exponent, base, -1});
    }
    return base;
  }

  int parse_primary() {
    switch (tok_.kind) {
      case Tok::number: {
        const double v = tok_.value;
        advance();
        return add(Node{NodeKind::number, v, 0, -1, -1});
      }
      case Tok::ident: {
        const Token id = tok_;
        advance();
        if (auto f = func_from_name(id.text)) {
          expect(Tok::lparen, {"("});
          const int arg = parse_expr();
          expect(Tok::rparen, {")", "+", "-", "*", "/", "^"});
          return add(Node{NodeKind::call, 0.0, static_cast<int>(*f), arg, -1});
        }
        if (tok_.kind == Tok::lparen)
          fail(ErrorKind::unknown_identifier, "unknown function '" + id.text + "' at line " +
                                                  std::to_string(id.line) + ", column " + std::to_string(id.column));
        const int node = add(Node{NodeKind::variable, 0.0, 0, -1, -1});
        refs_.push_back(VarRef{id.text, node, id.line, id.column});
        return node;
      }
      case Tok::lparen: {
        advance();
        const int inner = parse_expr();
        expect(Tok::rparen, {")", "+", "-", "*", "/", "^"});
        return inner;
      }
      default: error({"number", "identifier", "function", "("});
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
  MappingExpr expr_;
  std::vector<VarRef> refs_;
};

inline MappingExpr parse_mapping(std::string_view source) {
  bool blank = true;
  for (char c : source)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) fail(ErrorKind::invalid_input, "parse_mapping: empty source");
  return Parser(source).parse();
}

inline Vector eval_mapping(const MappingExpr& m, const Vector& x) { return m.evaluate(x); }

struct JacobianSample {
  Matrix jacobian;
  /// (row, col) entries whose magnitude exceeds 1/h or whose estimate is
  /// unstable under step refinement (blow-up of the true derivative).
  std::vector<std::pair<int, int>> near_singular;
  double step = 0.0;
};

inline JacobianSample jacobian_sample(const MappingExpr& m, const Vector& x, double h = 1e-6,
                                      DifferenceScheme scheme = DifferenceScheme::forward) {
  if (!(h > 0.0)) fail(ErrorKind::domain, "jacobian_sample: step must be positive");
  auto fn = [&](const Vector& p) {
    try {
      return m.evaluate(p);
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " at probe point " + format_point(p));
    }
  };
  JacobianSample out;
  out.step = h;
  out.jacobian = fd_jacobian(fn, x, h, scheme);
  const Matrix fine = fd_jacobian(fn, x, 0.25 * h, scheme);
  for (Eigen::Index i = 0; i < out.jacobian.rows(); ++i)
    for (Eigen::Index j = 0; j < out.jacobian.cols(); ++j) {
      const double a = out.jacobian(i, j), b = fine(i, j);
      const double mag = std::max(std::abs(a), std::abs(b));
      const bool huge = mag > 1.0 / h;
      const bool unstable = std::abs(a - b) > 0.25 * mag + 1e-3;
      if (huge || unstable) out.near_singular.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  return out;
}

}  // namespace pjinv::dsl
