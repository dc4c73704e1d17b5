#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "varsol/autodiff.hpp"
#include "varsol/errors.hpp"
#include "varsol/expr.hpp"
#include "varsol/implicit.hpp"
#include "varsol/linalg.hpp"

namespace varsol {

// A candidate Lagrangian density written over gradient slots g1..gn and
// optionally the field value phi. Weight-one status is always checked by
// weight_one_defect, never assumed from the label.
struct LagrangianSpec {
  std::size_t n = 0;
  Expression body;
  std::string label;

  void validate() const {
    if (n == 0) throw ConfigError("lagrangian needs at least one gradient slot");
    for (const auto& v : variables_of(body)) {
      if (v == "phi") continue;
      bool ok = v.size() > 1 && v[0] == 'g';
      std::size_t idx = 0;
      if (ok) {
        for (std::size_t p = 1; p < v.size(); ++p)
          if (v[p] < '0' || v[p] > '9') { ok = false; break; }
        if (ok) idx = std::stoul(v.substr(1));
      }
      if (!ok || idx < 1 || idx > n)
        throw ConfigError("lagrangian references '" + v + "' outside g1..g" +
                          std::to_string(n) + " and phi");
    }
  }
};

inline LagrangianSpec make_lagrangian(std::size_t n, const std::string& body,
                                      std::string label = {}) {
  LagrangianSpec L;
  L.n = n;
  L.body = parse_expression(body);
  L.label = label.empty() ? body : std::move(label);
  L.validate();
  return L;
}

// sqrt(sum_j metric_j g_j^2); all-plus signature when metric omitted.
inline LagrangianSpec companion(std::size_t n, const std::vector<int>& metric = {}) {
  std::vector<int> m = metric.empty() ? std::vector<int>(n, 1) : metric;
  if (m.size() != n) throw ConfigError("companion metric length must equal n");
  std::string pos, neg, sig;
  for (std::size_t j = 0; j < n; ++j) {
    std::string t = "g" + std::to_string(j + 1) + "^2";
    if (m[j] >= 0) { if (!pos.empty()) pos += "+"; pos += t; sig += "+"; }
    else { neg += "-" + t; sig += "-"; }
  }
  if (pos.empty()) pos = "0";
  return make_lagrangian(n, "sqrt(" + pos + neg + ")", "companion(" + std::to_string(n) +
                                                           "," + sig + ")");
}

// First/second derivatives of the body with respect to all g-slots and phi,
// in slot order g1..gn then phi.
inline Jet2 lagrangian_jet(const LagrangianSpec& L, const std::vector<double>& g, double phi) {
  if (g.size() != L.n) throw ConfigError("gradient vector has wrong length");
  std::vector<std::string> active;
  Bindings env;
  for (std::size_t j = 0; j < L.n; ++j) {
    active.push_back("g" + std::to_string(j + 1));
    env[active.back()] = g[j];
  }
  active.push_back("phi");
  env["phi"] = phi;
  return evaluate_jet2(L.body, active, env);
}

// Euler identity defect sum_j g_j dL/dg_j - L; zero characterizes weight one.
inline double weight_one_defect(const LagrangianSpec& L, const std::vector<double>& g,
                                double phi = 0.0) {
  Jet2 j = lagrangian_jet(L, g, phi);
  double acc = -j.value();
  for (std::size_t i = 0; i < L.n; ++i) acc += g[i] * j.grad(i);
  return acc;
}

// Gradient-slot Hessian of the body.
inline Mat gradient_hessian(const LagrangianSpec& L, const std::vector<double>& g,
                            double phi = 0.0) {
  Jet2 j = lagrangian_jet(L, g, phi);
  Mat M(L.n, L.n);
  for (std::size_t a = 0; a < L.n; ++a)
    for (std::size_t b = 0; b < L.n; ++b) M(a, b) = j.hess(a, b);
  return M;
}

// M g, where M is the gradient-slot Hessian. Differentiating the Euler
// identity shows this vanishes wherever the weight-one defect vanishes
// identically, so the gradient is always a null direction of M.
inline std::vector<double> hessian_nullvector_defect(const LagrangianSpec& L,
                                                     const std::vector<double>& g,
                                                     double phi = 0.0) {
  return gradient_hessian(L, g, phi).apply(g);
}

struct Residual {
  double raw = 0.0;
  double normalized = 0.0;
};

// Stationarity residual of the density at a field sample:
//   sum_jk phi_jk d2L/dg_j dg_k + sum_j phi_j d2L/dg_j dphi - dL/dphi,
// i.e. d/dx_j (dL/dg_j) - dL/dphi expanded through the chain rule. For a
// weight-one, phi-independent L this is exactly sum_jk phi_jk M_jk.
inline Residual el_residual(const LagrangianSpec& L, const FieldSample& s) {
  if (L.n != s.x.size()) throw ConfigError("lagrangian and sample dimensions differ");
  const std::size_t n = L.n;
  Jet2 j = lagrangian_jet(L, s.grad, s.phi);

  double raw = 0.0;
  double m_norm2 = 0.0, b_norm2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double m = j.hess(a, b);
      raw += s.hess(a, b) * m;
      m_norm2 += m * m;
    }
    double cross = j.hess(a, n);
    raw += s.grad[a] * cross;
    b_norm2 += cross * cross;
  }
  raw -= j.grad(n);

  double scale = std::sqrt(m_norm2) * frobenius(s.hess) + std::abs(j.grad(n)) +
                 norm2(s.grad) * std::sqrt(b_norm2) + 1e-30;
  return {raw, raw / scale};
}

}  // namespace varsol
