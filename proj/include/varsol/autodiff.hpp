#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varsol/expr.hpp"
#include "varsol/jet.hpp"

namespace varsol {

namespace detail {

inline bool jet_is_constant(const Jet2& j) {
  for (std::size_t i = 0; i < j.vars(); ++i) {
    if (j.grad(i) != 0.0) return false;
    for (std::size_t k = i; k < j.vars(); ++k)
      if (j.hess(i, k) != 0.0) return false;
  }
  return true;
}

}  // namespace detail

// Evaluate `e` carrying first and second derivatives with respect to the
// variables listed in `active` (in that order); every variable, active or
// not, takes its value from `env`. Domain rules match plain evaluation,
// except sqrt at exactly zero is rejected here because its derivative is
// unbounded there.
inline Jet2 evaluate_jet2(const Expression& e, const std::vector<std::string>& active,
                          const Bindings& env) {
  const std::size_t m = active.size();
  struct Ev {
    const Expression& ex;
    const std::vector<std::string>& active;
    const Bindings& env;
    std::size_t m;
    Jet2 go(int i) const {
      const ExprNode& n = ex.node(i);
      switch (n.kind) {
        case NodeKind::Number: return Jet2::constant(n.number, m);
        case NodeKind::Variable: {
          auto it = env.find(n.name);
          if (it == env.end())
            throw EvalError(n.pos, "unbound variable '" + n.name + "'");
          for (std::size_t k = 0; k < m; ++k)
            if (active[k] == n.name) return Jet2::variable(it->second, k, m);
          return Jet2::constant(it->second, m);
        }
        case NodeKind::Neg: return -go(n.a);
        case NodeKind::Add: return go(n.a) + go(n.b);
        case NodeKind::Sub: return go(n.a) - go(n.b);
        case NodeKind::Mul: return go(n.a) * go(n.b);
        case NodeKind::Div: {
          Jet2 u = go(n.a), v = go(n.b);
          if (v.value() == 0.0) throw EvalError(n.pos, "division by zero");
          return u / v;
        }
        case NodeKind::Pow: {
          Jet2 base = go(n.a), expo = go(n.b);
          long long k = 0;
          if (detail::jet_is_constant(expo) && detail::integral_exponent(expo.value(), k)) {
            if (k >= 0) return powi(base, k);
            if (base.value() == 0.0)
              throw EvalError(n.pos, "zero base with negative exponent");
            return Jet2::constant(1.0, m) / powi(base, -k);
          }
          if (base.value() <= 0.0)
            throw EvalError(n.pos, "non-integer power of a non-positive base");
          return exp(expo * log(base));
        }
        case NodeKind::Call: {
          Jet2 v = go(n.a);
          switch (n.fn) {
            case Builtin::Sin: return sin(v);
            case Builtin::Cos: return cos(v);
            case Builtin::Exp: return exp(v);
            case Builtin::Log:
              if (v.value() <= 0.0) throw EvalError(n.pos, "log of non-positive value");
              return log(v);
            case Builtin::Sqrt:
              if (v.value() <= 0.0)
                throw EvalError(n.pos, "sqrt needs a positive value when differentiating");
              return sqrt(v);
            case Builtin::Tanh: return tanh(v);
          }
          throw EvalError(n.pos, "unknown function");
        }
      }
      throw EvalError(n.pos, "malformed expression node");
    }
  };
  return Ev{e, active, env, m}.go(e.root());
}

struct Derivatives1D {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

inline Derivatives1D derivatives_1d(const Expression& e, const std::string& var, double x) {
  Bindings env{{var, x}};
  Jet2 j = evaluate_jet2(e, {var}, env);
  return {j.value(), j.grad(0), j.hess(0, 0)};
}

inline Derivatives1D derivatives_1d(const std::string& text, const std::string& var, double x) {
  return derivatives_1d(parse_expression(text), var, x);
}

}  // namespace varsol
