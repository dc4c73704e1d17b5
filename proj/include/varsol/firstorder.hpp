#pragma once

#include <cmath>
#include <vector>

#include "varsol/errors.hpp"
#include "varsol/implicit.hpp"
#include "varsol/lagrangian.hpp"
#include "varsol/linalg.hpp"

namespace varsol {

// Ratio variables u_k = phi_k / phi_n (k = 1..n-1) and their exact
// x-derivatives from the parent sample's grad/hess by the quotient rule.
struct RatioSample {
  std::vector<double> u;  // length n-1
  Mat du;                 // (n-1) x n, du(k,j) = d u_k / d x_j
};

inline RatioSample ratios(const FieldSample& s) {
  const std::size_t n = s.x.size();
  if (n < 2) throw ConfigError("ratio variables need n >= 2");
  const double pn = s.grad[n - 1];
  if (std::abs(pn) <= 1e-10 * norm2(s.grad))
    throw VanishingDenominator("phi_n too small relative to the gradient");

  RatioSample r;
  r.u.resize(n - 1);
  r.du = Mat(n - 1, n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    r.u[k] = s.grad[k] / pn;
    for (std::size_t j = 0; j < n; ++j)
      r.du(k, j) = (s.hess(k, j) * pn - s.grad[k] * s.hess(n - 1, j)) / (pn * pn);
  }
  return r;
}

// Symmetric pair relation in polynomial form (no phi_n division):
//   phi_nn phi_j phi_k - phi_nj phi_n phi_k - phi_nk phi_n phi_j
//                      + phi_jk phi_n^2,
// which equals -(1/2) phi_n^3 (u_j u_k,n + u_k u_j,n - u_k,j - u_j,k).
// Indices are 0-based over the first n-1 slots.
inline Residual sym_defect(const FieldSample& s, std::size_t j, std::size_t k) {
  const std::size_t n = s.x.size();
  if (j + 1 >= n || k + 1 >= n) throw ConfigError("pair indices must lie in 1..n-1");
  const double pn = s.grad[n - 1];
  double raw = s.hess(n - 1, n - 1) * s.grad[j] * s.grad[k] -
               s.hess(n - 1, j) * pn * s.grad[k] -
               s.hess(n - 1, k) * pn * s.grad[j] + s.hess(j, k) * pn * pn;
  double g2 = dot(s.grad, s.grad);
  return {raw, raw / (g2 * frobenius(s.hess) + 1e-30)};
}

// The reduced relation u_j du_k/dx_n - du_k/dx_j; zero along any field
// whose ratio variables depend on x only through phi.
inline Residual simple_defect(const FieldSample& s, std::size_t j, std::size_t k) {
  const std::size_t n = s.x.size();
  if (j + 1 >= n || k + 1 >= n) throw ConfigError("pair indices must lie in 1..n-1");
  RatioSample r = ratios(s);
  double raw = r.u[j] * r.du(k, n - 1) - r.du(k, j);
  return {raw, raw / (norm2(r.u) * frobenius(r.du) + 1e-30)};
}

// Cross-check between the two forms: sym_defect's polynomial value must
// equal -(1/2) phi_n^3 times the symmetrized u-relation built from ratios().
// Returns the discrepancy on sym_defect's own normalization scale.
inline double form_consistency_defect(const FieldSample& s, std::size_t j, std::size_t k) {
  const std::size_t n = s.x.size();
  if (j + 1 >= n || k + 1 >= n) throw ConfigError("pair indices must lie in 1..n-1");
  RatioSample r = ratios(s);
  const double pn = s.grad[n - 1];
  double ucomb = r.u[j] * r.du(k, n - 1) + r.u[k] * r.du(j, n - 1) - r.du(k, j) - r.du(j, k);
  double via_u = -0.5 * pn * pn * pn * ucomb;
  double direct = sym_defect(s, j, k).raw;
  double g2 = dot(s.grad, s.grad);
  return std::abs(direct - via_u) / (g2 * frobenius(s.hess) + 1e-30);
}

}  // namespace varsol
