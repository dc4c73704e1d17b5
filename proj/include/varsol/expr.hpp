#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "varsol/errors.hpp"

namespace varsol {

// Arithmetic expressions over named variables.
//
// Grammar (power binds tighter than * and /, and is right-associative;
// unary minus binds tighter than power):
//   expr    := term (("+" | "-") term)*
//   term    := factor (("*" | "/") factor)*
//   factor  := unary ("^" factor)?
//   unary   := "-" unary | primary
//   primary := number | ident | ident "(" expr ")" | "(" expr ")"
//
// Known functions: sin cos exp log sqrt tanh.

enum class NodeKind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Builtin { Sin, Cos, Exp, Log, Sqrt, Tanh };

inline const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Exp: return "exp";
    case Builtin::Log: return "log";
    case Builtin::Sqrt: return "sqrt";
    case Builtin::Tanh: return "tanh";
  }
  return "?";
}

struct ExprNode {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  std::string name;              // Variable
  Builtin fn = Builtin::Sin;     // Call
  int a = -1;                    // first child
  int b = -1;                    // second child (binary ops)
  std::size_t pos = 0;           // byte offset in the source text
};

// Immutable tree stored as a flat node arena; cheap to copy, index-addressed.
class Expression {
 public:
  Expression() = default;
  Expression(std::vector<ExprNode> nodes, int root)
      : nodes_(std::move(nodes)), root_(root) {}

  bool empty() const { return root_ < 0; }
  int root() const { return root_; }
  const ExprNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<ExprNode> nodes_;
  int root_ = -1;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
    int root = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
    return Expression(std::move(nodes_), root);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool eat(char c) {
    if (at(c)) { ++pos_; return true; }
    return false;
  }

  int add_node(ExprNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_ws();
      std::size_t p = pos_;
      if (eat('+')) lhs = add_node({NodeKind::Add, 0, "", Builtin::Sin, lhs, parse_term(), p});
      else if (eat('-')) lhs = add_node({NodeKind::Sub, 0, "", Builtin::Sin, lhs, parse_term(), p});
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      skip_ws();
      std::size_t p = pos_;
      if (eat('*')) lhs = add_node({NodeKind::Mul, 0, "", Builtin::Sin, lhs, parse_factor(), p});
      else if (eat('/')) lhs = add_node({NodeKind::Div, 0, "", Builtin::Sin, lhs, parse_factor(), p});
      else return lhs;
    }
  }

  int parse_factor() {
    int base = parse_unary();
    skip_ws();
    std::size_t p = pos_;
    if (eat('^'))
      return add_node({NodeKind::Pow, 0, "", Builtin::Sin, base, parse_factor(), p});
    return base;
  }

  int parse_unary() {
    skip_ws();
    std::size_t p = pos_;
    if (eat('-'))
      return add_node({NodeKind::Neg, 0, "", Builtin::Sin, parse_unary(), -1, p});
    return parse_primary();
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!eat(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_ident();
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '_';
  }

  int parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following identifier, not this literal
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError(start, "malformed number literal");
    return add_node({NodeKind::Number, value, "", Builtin::Sin, -1, -1, start});
  }

  int parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (at('(')) {
      Builtin fn;
      if (name == "sin") fn = Builtin::Sin;
      else if (name == "cos") fn = Builtin::Cos;
      else if (name == "exp") fn = Builtin::Exp;
      else if (name == "log") fn = Builtin::Log;
      else if (name == "sqrt") fn = Builtin::Sqrt;
      else if (name == "tanh") fn = Builtin::Tanh;
      else throw ParseError(start, "unknown function '" + name + "'");
      ++pos_;  // '('
      int arg = parse_expr();
      if (!eat(')')) throw ParseError(pos_, "expected ')'");
      return add_node({NodeKind::Call, 0, "", fn, arg, -1, start});
    }
    return add_node({NodeKind::Variable, 0, std::move(name), Builtin::Sin, -1, -1, start});
  }
};

}  // namespace detail

inline Expression parse_expression(std::string_view text) {
  return detail::Parser(text).run();
}

using Bindings = std::map<std::string, double>;

namespace detail {

// x^k for integer k by repeated multiplication; k >= 0.
inline double powi(double x, long long k) {
  double acc = 1.0, base = x;
  for (long long e = k; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return acc;
}

inline bool integral_exponent(double e, long long& k) {
  if (!std::isfinite(e) || std::abs(e) > 1e15) return false;
  double r = std::nearbyint(e);
  if (r != e) return false;
  k = static_cast<long long>(r);
  return true;
}

}  // namespace detail

// Plain double evaluation. Domain violations (division by zero, log of a
// non-positive value, sqrt of a negative, zero base with a negative or
// non-integer exponent, negative base with a non-integer exponent) raise
// EvalError naming the offending node's source offset.
inline double evaluate(const Expression& e, const Bindings& env) {
  struct Ev {
    const Expression& ex;
    const Bindings& env;
    double go(int i) const {
      const ExprNode& n = ex.node(i);
      switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::Variable: {
          auto it = env.find(n.name);
          if (it == env.end())
            throw EvalError(n.pos, "unbound variable '" + n.name + "'");
          return it->second;
        }
        case NodeKind::Neg: return -go(n.a);
        case NodeKind::Add: return go(n.a) + go(n.b);
        case NodeKind::Sub: return go(n.a) - go(n.b);
        case NodeKind::Mul: return go(n.a) * go(n.b);
        case NodeKind::Div: {
          double u = go(n.a), v = go(n.b);
          if (v == 0.0) throw EvalError(n.pos, "division by zero");
          return u / v;
        }
        case NodeKind::Pow: {
          double base = go(n.a), expo = go(n.b);
          long long k = 0;
          if (detail::integral_exponent(expo, k)) {
            if (k >= 0) return detail::powi(base, k);
            if (base == 0.0) throw EvalError(n.pos, "zero base with negative exponent");
            return 1.0 / detail::powi(base, -k);
          }
          if (base <= 0.0)
            throw EvalError(n.pos, "non-integer power of a non-positive base");
          return std::exp(expo * std::log(base));
        }
        case NodeKind::Call: {
          double v = go(n.a);
          switch (n.fn) {
            case Builtin::Sin: return std::sin(v);
            case Builtin::Cos: return std::cos(v);
            case Builtin::Exp: return std::exp(v);
            case Builtin::Log:
              if (v <= 0.0) throw EvalError(n.pos, "log of non-positive value");
              return std::log(v);
            case Builtin::Sqrt:
              if (v < 0.0) throw EvalError(n.pos, "sqrt of negative value");
              return std::sqrt(v);
            case Builtin::Tanh: return std::tanh(v);
          }
          throw EvalError(n.pos, "unknown function");
        }
      }
      throw EvalError(n.pos, "malformed expression node");
    }
  };
  return Ev{e, env}.go(e.root());
}

inline void collect_variables(const Expression& e, int i, std::set<std::string>& out) {
  const ExprNode& n = e.node(i);
  if (n.kind == NodeKind::Variable) out.insert(n.name);
  if (n.a >= 0) collect_variables(e, n.a, out);
  if (n.b >= 0) collect_variables(e, n.b, out);
}

inline std::set<std::string> variables_of(const Expression& e) {
  std::set<std::string> out;
  if (!e.empty()) collect_variables(e, e.root(), out);
  return out;
}

// Fully parenthesized rendering; re-parsing yields a structurally identical
// tree regardless of precedence subtleties.
inline std::string to_string(const Expression& e) {
  struct Pr {
    const Expression& ex;
    std::string go(int i) const {
      const ExprNode& n = ex.node(i);
      std::ostringstream os;
      switch (n.kind) {
        case NodeKind::Number: {
          os.precision(17);
          os << n.number;
          break;
        }
        case NodeKind::Variable: os << n.name; break;
        case NodeKind::Neg: os << "(-" << go(n.a) << ")"; break;
        case NodeKind::Add: os << "(" << go(n.a) << "+" << go(n.b) << ")"; break;
        case NodeKind::Sub: os << "(" << go(n.a) << "-" << go(n.b) << ")"; break;
        case NodeKind::Mul: os << "(" << go(n.a) << "*" << go(n.b) << ")"; break;
        case NodeKind::Div: os << "(" << go(n.a) << "/" << go(n.b) << ")"; break;
        case NodeKind::Pow: os << "(" << go(n.a) << "^" << go(n.b) << ")"; break;
        case NodeKind::Call: os << builtin_name(n.fn) << "(" << go(n.a) << ")"; break;
      }
      return os.str();
    }
  };
  return e.empty() ? std::string() : Pr{e}.go(e.root());
}

inline bool structurally_equal(const Expression& x, const Expression& y) {
  struct Eq {
    const Expression& a;
    const Expression& b;
    bool go(int i, int j) const {
      const ExprNode& u = a.node(i);
      const ExprNode& v = b.node(j);
      if (u.kind != v.kind) return false;
      switch (u.kind) {
        case NodeKind::Number: return u.number == v.number;
        case NodeKind::Variable: return u.name == v.name;
        case NodeKind::Call: return u.fn == v.fn && go(u.a, v.a);
        case NodeKind::Neg: return go(u.a, v.a);
        default: return go(u.a, v.a) && go(u.b, v.b);
      }
    }
  };
  if (x.empty() || y.empty()) return x.empty() == y.empty();
  return Eq{x, y}.go(x.root(), y.root());
}

// Replace every occurrence of `var` with the tree `replacement`.
inline Expression substitute(const Expression& e, const std::string& var,
                             const Expression& replacement) {
  std::vector<ExprNode> nodes;
  struct Sub {
    const Expression& ex;
    const std::string& var;
    const Expression& rep;
    std::vector<ExprNode>& nodes;
    int copy_rep(int i) {
      ExprNode n = rep.node(i);
      if (n.a >= 0) n.a = copy_rep(n.a);
      if (n.b >= 0) n.b = copy_rep(n.b);
      nodes.push_back(n);
      return static_cast<int>(nodes.size()) - 1;
    }
    int go(int i) {
      ExprNode n = ex.node(i);
      if (n.kind == NodeKind::Variable && n.name == var) return copy_rep(rep.root());
      if (n.a >= 0) n.a = go(n.a);
      if (n.b >= 0) n.b = go(n.b);
      nodes.push_back(n);
      return static_cast<int>(nodes.size()) - 1;
    }
  };
  Sub s{e, var, replacement, nodes};
  int root = s.go(e.root());
  return Expression(std::move(nodes), root);
}

}  // namespace varsol
