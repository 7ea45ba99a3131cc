#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lattgen/errors.hpp"

namespace lattgen {

// Arithmetic expressions over named variables.
// Grammar (documented in docs/expression_grammar.md):
//   sum     = product { ("+" | "-") product }
//   product = unary { ("*" | "/") unary }
//   unary   = "-" unary | power
//   power   = primary [ "^" unary ]          (right-associative)
//   primary = number | name | name "(" sum { "," sum } ")" | "(" sum ")"
// Precedence: ^ binds tighter than unary minus, which binds tighter than * /,
// which bind tighter than + -.

using Bindings = std::map<std::string, double>;

enum class ExprOp { Number, Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class FuncId { Sin, Cos, Tan, Sqrt, Exp, Ln, Abs, Min, Max };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable after construction; safe to share across threads.
struct ExprNode {
  ExprOp op;
  double number = 0.0;     // Number, Constant
  std::string name;        // Constant, Variable, Call
  FuncId func = FuncId::Sin;
  std::vector<ExprPtr> args;
};

namespace detail {

struct FuncInfo {
  const char* name;
  FuncId id;
  int arity;
};

inline const FuncInfo* lookup_function(std::string_view name) {
  static const FuncInfo table[] = {
      {"sin", FuncId::Sin, 1},  {"cos", FuncId::Cos, 1}, {"tan", FuncId::Tan, 1},
      {"sqrt", FuncId::Sqrt, 1}, {"exp", FuncId::Exp, 1}, {"ln", FuncId::Ln, 1},
      {"abs", FuncId::Abs, 1},  {"min", FuncId::Min, 2}, {"max", FuncId::Max, 2},
  };
  for (const auto& f : table)
    if (name == f.name) return &f;
  return nullptr;
}

inline bool lookup_constant(std::string_view name, double* out) {
  if (name == "pi") { *out = 3.14159265358979323846; return true; }
  if (name == "e") { *out = 2.71828182845904523536; return true; }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr run() {
    ExprPtr e = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ExprParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ExprParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek_is(c)) { ++pos_; return true; }
    return false;
  }

  void expect(char c, const char* ctx) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c)
      fail(std::string("expected '") + c + "' " + ctx);
    ++pos_;
  }

  static ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

  static ExprPtr binary(ExprOp op, ExprPtr l, ExprPtr r) {
    ExprNode n;
    n.op = op;
    n.args = {std::move(l), std::move(r)};
    return make(std::move(n));
  }

  ExprPtr sum() {
    ExprPtr e = product();
    for (;;) {
      if (accept('+')) e = binary(ExprOp::Add, e, product());
      else if (accept('-')) e = binary(ExprOp::Sub, e, product());
      else return e;
    }
  }

  ExprPtr product() {
    ExprPtr e = unary();
    for (;;) {
      if (accept('*')) e = binary(ExprOp::Mul, e, unary());
      else if (accept('/')) e = binary(ExprOp::Div, e, unary());
      else return e;
    }
  }

  ExprPtr unary() {
    if (accept('-')) {
      ExprNode n;
      n.op = ExprOp::Neg;
      n.args = {unary()};
      return make(std::move(n));
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (accept('^')) return binary(ExprOp::Pow, base, unary());
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected a value");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = sum();
      expect(')', "to close parenthesis");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return name();
    fail("unexpected character");
  }

  ExprPtr number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to the next token
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (text == ".") fail_at("malformed number", start);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) fail_at("malformed number", start);
    ExprNode n;
    n.op = ExprOp::Number;
    n.number = v;
    return make(std::move(n));
  }

  ExprPtr name() {
    std::size_t start = pos_;
    auto is_word = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    };
    while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
    std::string id(src_.substr(start, pos_ - start));

    if (peek_is('(')) {
      const FuncInfo* f = lookup_function(id);
      if (!f) fail_at("unknown function '" + id + "'", start);
      expect('(', "after function name");
      ExprNode n;
      n.op = ExprOp::Call;
      n.name = id;
      n.func = f->id;
      n.args.push_back(sum());
      while (accept(',')) n.args.push_back(sum());
      expect(')', "to close argument list");
      if (static_cast<int>(n.args.size()) != f->arity)
        fail_at("function '" + id + "' expects " + std::to_string(f->arity) + " argument(s)",
                start);
      return make(std::move(n));
    }

    double cval = 0.0;
    if (lookup_constant(id, &cval)) {
      ExprNode n;
      n.op = ExprOp::Constant;
      n.name = id;
      n.number = cval;
      return make(std::move(n));
    }
    if (lookup_function(id)) fail_at("expected '(' after function '" + id + "'", start);
    ExprNode n;
    n.op = ExprOp::Variable;
    n.name = id;
    return make(std::move(n));
  }
};

inline double eval_node(const ExprNode& e, const Bindings& b) {
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw ExprEvalError(std::string("non-finite result from ") + what);
    return v;
  };
  switch (e.op) {
    case ExprOp::Number:
    case ExprOp::Constant:
      return e.number;
    case ExprOp::Variable: {
      auto it = b.find(e.name);
      if (it == b.end()) throw ExprEvalError("unbound variable '" + e.name + "'");
      return it->second;
    }
    case ExprOp::Neg:
      return -eval_node(*e.args[0], b);
    case ExprOp::Add:
      return finite(eval_node(*e.args[0], b) + eval_node(*e.args[1], b), "addition");
    case ExprOp::Sub:
      return finite(eval_node(*e.args[0], b) - eval_node(*e.args[1], b), "subtraction");
    case ExprOp::Mul:
      return finite(eval_node(*e.args[0], b) * eval_node(*e.args[1], b), "multiplication");
    case ExprOp::Div: {
      double num = eval_node(*e.args[0], b);
      double den = eval_node(*e.args[1], b);
      if (den == 0.0) throw ExprEvalError("division by zero");
      return finite(num / den, "division");
    }
    case ExprOp::Pow: {
      double base = eval_node(*e.args[0], b);
      double exp = eval_node(*e.args[1], b);
      if (base == 0.0 && exp < 0.0) throw ExprEvalError("zero raised to a negative power");
      if (base < 0.0 && exp != std::floor(exp))
        throw ExprEvalError("fractional power of a negative base");
      return finite(std::pow(base, exp), "power");
    }
    case ExprOp::Call: {
      double a = eval_node(*e.args[0], b);
      switch (e.func) {
        case FuncId::Sin: return std::sin(a);
        case FuncId::Cos: return std::cos(a);
        case FuncId::Tan: return finite(std::tan(a), "tan");
        case FuncId::Sqrt:
          if (a < 0.0) throw ExprEvalError("square root of a negative value");
          return std::sqrt(a);
        case FuncId::Exp: return finite(std::exp(a), "exp");
        case FuncId::Ln:
          if (a <= 0.0) throw ExprEvalError("logarithm of a non-positive value");
          return std::log(a);
        case FuncId::Abs: return std::fabs(a);
        case FuncId::Min: return std::fmin(a, eval_node(*e.args[1], b));
        case FuncId::Max: return std::fmax(a, eval_node(*e.args[1], b));
      }
      throw ExprEvalError("unknown function id");
    }
  }
  throw ExprEvalError("unknown expression node");
}

inline void collect_variables(const ExprNode& e, std::set<std::string>& out) {
  if (e.op == ExprOp::Variable) out.insert(e.name);
  for (const auto& a : e.args) collect_variables(*a, out);
}

// Precedence levels for the printer; matches the grammar above.
inline int node_prec(const ExprNode& e) {
  switch (e.op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Neg: return 3;
    case ExprOp::Pow: return 4;
    default: return 5;
  }
}

inline void print_node(const ExprNode& e, std::string& out);

inline void print_child(const ExprNode& child, int min_prec, std::string& out) {
  bool parens = node_prec(child) < min_prec;
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

inline void print_node(const ExprNode& e, std::string& out) {
  switch (e.op) {
    case ExprOp::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      return;
    }
    case ExprOp::Constant:
    case ExprOp::Variable:
      out += e.name;
      return;
    case ExprOp::Neg:
      out += '-';
      print_child(*e.args[0], 3, out);
      return;
    case ExprOp::Add:
    case ExprOp::Sub:
      print_child(*e.args[0], 1, out);
      out += (e.op == ExprOp::Add) ? " + " : " - ";
      print_child(*e.args[1], 2, out);  // right operand of - must not re-associate
      return;
    case ExprOp::Mul:
    case ExprOp::Div:
      print_child(*e.args[0], 2, out);
      out += (e.op == ExprOp::Mul) ? "*" : "/";
      print_child(*e.args[1], 3, out);
      return;
    case ExprOp::Pow:
      print_child(*e.args[0], 5, out);  // base re-parses as a primary
      out += '^';
      print_child(*e.args[1], 3, out);  // exponent may be a unary chain
      return;
    case ExprOp::Call: {
      out += e.name;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*e.args[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace detail

class Expression {
 public:
  Expression() = default;
  Expression(ExprPtr root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  bool valid() const { return root_ != nullptr; }
  const std::string& source() const { return source_; }

  double evaluate(const Bindings& b) const {
    if (!root_) throw ExprEvalError("empty expression");
    return detail::eval_node(*root_, b);
  }

  std::set<std::string> free_variables() const {
    std::set<std::string> out;
    if (root_) detail::collect_variables(*root_, out);
    return out;
  }

  std::string to_string() const {
    std::string out;
    if (root_) detail::print_node(*root_, out);
    return out;
  }

 private:
  ExprPtr root_;
  std::string source_;
};

inline Expression parse_expression(std::string_view text) {
  detail::Parser p(text);
  return Expression(p.run(), std::string(text));
}

}  // namespace lattgen
