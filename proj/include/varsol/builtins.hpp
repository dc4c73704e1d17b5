#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "varsol/autodiff.hpp"
#include "varsol/errors.hpp"
#include "varsol/expr.hpp"
#include "varsol/implicit.hpp"
#include "varsol/lagrangian.hpp"
#include "varsol/multifield.hpp"
#include "varsol/rng.hpp"

namespace varsol {
namespace builtins {

// Synthetic sample of an explicit field written over x1..xn; used for
// control fields whose stationarity residuals must NOT vanish.
inline FieldSample field_from_expression(const std::string& body,
                                         const std::vector<double>& x) {
  Expression e = parse_expression(body);
  const std::size_t n = x.size();
  std::vector<std::string> active;
  Bindings env;
  for (std::size_t j = 0; j < n; ++j) {
    active.push_back("x" + std::to_string(j + 1));
    env[active.back()] = x[j];
  }
  Jet2 jet = evaluate_jet2(e, active, env);
  FieldSample s;
  s.x = x;
  s.phi = jet.value();
  s.grad.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.grad[j] = jet.grad(j);
  s.hess = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) s.hess(j, k) = jet.hess(j, k);
  s.denom = 0.0;
  return s;
}

// Fixed non-solution control field per dimension: x1*x2, then + x3^2, + x4^2.
inline std::string control_field_body(std::size_t n) {
  std::string body = "x1*x2";
  for (std::size_t j = 3; j <= n; ++j)
    body += "+x" + std::to_string(j) + "^2";
  return body;
}

// Diverse weight-one densities over n gradient slots: the isotropic
// square-root form, a rational form, and two cone-homogenized forms
// |g_n| * K(g_1/g_n, ...). All are smooth wherever the relevant slots are
// nonzero, which the sampling boxes guarantee.
inline std::vector<LagrangianSpec> pool_lagrangians(std::size_t n) {
  if (n < 2) throw ConfigError("lagrangian pool needs n >= 2");
  std::vector<LagrangianSpec> pool;
  pool.push_back(companion(n));
  pool.push_back(make_lagrangian(n, "g1^2/g2", "rational(" + std::to_string(n) + ")"));
  std::string gn = "g" + std::to_string(n);
  std::string k = "1";
  for (std::size_t j = 1; j < n; ++j) k += "+(g" + std::to_string(j) + "/" + gn + ")^2";
  pool.push_back(make_lagrangian(n, "sqrt(" + gn + "^2)*(" + k + ")",
                                 "cone_poly(" + std::to_string(n) + ")"));
  pool.push_back(make_lagrangian(n, "sqrt(" + gn + "^2)*(2+sin(g1/" + gn + "))",
                                 "cone_sin(" + std::to_string(n) + ")"));
  return pool;
}

namespace detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// One random constraint component: a smooth function of phi with positive
// values on the working range and coefficients that keep the corner
// validation below solvable.
inline std::string random_component(Rng& rng) {
  switch (rng.index(4)) {
    case 0: {
      double b = rng.uniform(1.0, 2.0);
      double a = rng.uniform(0.5, b);
      return detail::num(a) + "+" + detail::num(b) + "*phi";
    }
    case 1:
      return detail::num(rng.uniform(0.5, 2.0)) + "*phi^2";
    case 2:
      return detail::num(rng.uniform(0.5, 1.5)) + "*exp(" +
             detail::num(rng.uniform(0.75, 2.0)) + "*phi)";
    default:
      return detail::num(rng.uniform(0.5, 1.5)) + "*sin(" +
             detail::num(rng.uniform(0.75, 2.0)) + "*phi)+2";
  }
}

// Draw families until one is solvable over the whole box: the constraint
// must change sign across the bracket at every box corner. The constraint
// is linear in x, so corner checks bound the entire box.
inline FamilySpec random_family(std::size_t n, Rng& rng,
                                std::pair<double, double> box = {0.5, 1.5},
                                std::string label = {}) {
  const double blo = 0.05, bhi = 3.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<std::string> bodies;
    for (std::size_t j = 0; j < n; ++j) bodies.push_back(random_component(rng));
    FamilySpec fam = make_family(n, bodies, 0.0, {{blo, bhi}}, {}, label);

    std::vector<double> f_lo(n), f_hi(n), f_mid(n);
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      Bindings lo{{"phi", blo}}, hi{{"phi", bhi}}, mid{{"phi", 1.0}};
      f_lo[j] = evaluate(fam.F[j], lo);
      f_hi[j] = evaluate(fam.F[j], hi);
      f_mid[j] = evaluate(fam.F[j], mid);
      c += f_mid[j];
    }
    fam.c = c;

    bool ok = true;
    for (std::size_t corner = 0; ok && corner < (1u << n); ++corner) {
      double at_lo = -c, at_hi = -c;
      for (std::size_t j = 0; j < n; ++j) {
        double xj = (corner >> j) & 1 ? box.second : box.first;
        at_lo += xj * f_lo[j];
        at_hi += xj * f_hi[j];
      }
      ok = at_lo < 0.0 && at_hi > 0.0;
    }
    if (ok) return fam;
  }
  throw ConfigError("could not draw a box-solvable family");
}

// Two fixed multifield scenarios with mild nonlinearity; coefficients are
// sized so the field Jacobian stays invertible over the sampling box.
inline std::vector<MultiFamilySpec> default_multifamilies() {
  std::vector<MultiFamilySpec> out;
  {
    double c2 = 2.0 + 0.05 * std::exp(1.0);
    out.push_back(make_multifamily(
        2, 3,
        {{"1", "phi1", "0.05*phi2^2"}, {"phi2", "0.05*exp(phi1)", "1"}},
        {2.05, c2}, {}, "mf_exp_quad"));
  }
  {
    double c1 = 2.0 + 0.2 * std::sin(1.0);
    out.push_back(make_multifamily(
        2, 3,
        {{"phi1", "0.2*sin(phi2)", "1"}, {"0.05*phi1^2", "1", "phi2"}},
        {c1, 2.05}, {}, "mf_sin_quad"));
  }
  return out;
}

}  // namespace builtins
}  // namespace varsol
