#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "varsol/errors.hpp"
#include "varsol/implicit.hpp"
#include "varsol/lagrangian.hpp"
#include "varsol/linalg.hpp"

namespace varsol {

// One member of the iterated equation-of-motion tower: order r with r+1
// Lagrangian factors (all equal for the plain iteration, distinct for the
// mixed one).
struct HierarchyOrder {
  std::size_t r = 0;
  std::vector<LagrangianSpec> lagrangians;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> c(k);
  for (std::size_t a = 0; a < k; ++a) c[a] = a;
  for (;;) {
    out.push_back(c);
    std::size_t a = k;
    bool more = false;
    while (a-- > 0) {
      if (c[a] + 1 <= n - (k - a)) {
        ++c[a];
        for (std::size_t b = a + 1; b < k; ++b) c[b] = c[b - 1] + 1;
        more = true;
        break;
      }
    }
    if (!more) return out;
  }
}

struct SignedPerm {
  std::vector<std::size_t> p;
  int sign;
};

inline std::vector<SignedPerm> signed_permutations(std::size_t k) {
  std::vector<SignedPerm> out;
  std::vector<std::size_t> p(k);
  for (std::size_t a = 0; a < k; ++a) p[a] = a;
  do {
    int inv = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (p[a] > p[b]) ++inv;
    out.push_back({p, inv % 2 == 0 ? 1 : -1});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace detail

// Iterated equation of motion, evaluated as the full index contraction
//
//   sum over (r+1)-tuples (i_1..i_{r+1}), (j_1..j_{r+1}) of
//     prod_a M^a(i_a, j_a) * det[ hess(i_alpha, j_beta) ]
//
// where M^a is the gradient-slot Hessian of the a-th Lagrangian. The
// determinant factor kills tuples with repeated indices, so the sum is
// grouped over index subsets S, T with an alternating-sign inner sum over
// tuple orderings. r = 0 reduces to sum_ij M_ij hess_ij, the second-order
// term of el_residual, which pins the convention; the determinant grouping
// is what makes weight-one degeneracy annihilate every order.
inline Residual generic_residual(const HierarchyOrder& order, const FieldSample& s) {
  const std::size_t n = s.x.size();
  const std::size_t k = order.r + 1;
  if (k > n) throw ConfigError("hierarchy order must satisfy r <= n-1");
  if (order.lagrangians.size() != k)
    throw ConfigError("hierarchy order r needs exactly r+1 lagrangians");
  for (const auto& L : order.lagrangians)
    if (L.n != n) throw ConfigError("hierarchy lagrangian dimension mismatch");

  std::vector<Mat> M;
  double mscale = 1.0;
  for (const auto& L : order.lagrangians) {
    M.push_back(gradient_hessian(L, s.grad, s.phi));
    mscale *= frobenius(M.back());
  }

  auto subsets = detail::combinations(n, k);
  auto perms = detail::signed_permutations(k);

  double raw = 0.0;
  for (const auto& S : subsets)
    for (const auto& T : subsets) {
      double detH = 0.0;
      for (const auto& tau : perms) {
        double prod = tau.sign;
        for (std::size_t a = 0; a < k; ++a) prod *= s.hess(S[a], T[tau.p[a]]);
        detH += prod;
      }
      if (detH == 0.0) continue;
      double coeff = 0.0;
      for (const auto& sigma : perms)
        for (const auto& tau : perms) {
          double prod = sigma.sign * tau.sign;
          for (std::size_t a = 0; a < k; ++a) prod *= M[a](S[sigma.p[a]], T[tau.p[a]]);
          coeff += prod;
        }
      raw += coeff * detH;
    }

  double hnorm = frobenius(s.hess);
  double scale = mscale;
  for (std::size_t a = 0; a < k; ++a) scale *= hnorm;
  return {raw, raw / (scale + 1e-30)};
}

// Top nontrivial member of the tower: the order whose factor count is n-1.
// (With n factors the coefficient sum degenerates — every row of every M
// is orthogonal to the gradient, so each inner determinant vanishes
// identically — which is where the iteration terminates.) For n = 2 this
// is the classical second-order form
//   g2^2 h11 - 2 g1 g2 h12 + g1^2 h22,
// returned directly; for n >= 3 the contraction with n-1 companion factors.
inline Residual universal_field_residual(const FieldSample& s) {
  const std::size_t n = s.x.size();
  if (n < 2) throw ConfigError("universal field residual needs n >= 2");
  if (n == 2) {
    double g1 = s.grad[0], g2 = s.grad[1];
    double raw = g2 * g2 * s.hess(0, 0) - 2.0 * g1 * g2 * s.hess(0, 1) +
                 g1 * g1 * s.hess(1, 1);
    double gn = dot(s.grad, s.grad);
    return {raw, raw / (gn * frobenius(s.hess) + 1e-30)};
  }
  HierarchyOrder order;
  order.r = n - 2;
  order.lagrangians.assign(n - 1, companion(n));
  return generic_residual(order, s);
}

}  // namespace varsol
