#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "varsol/autodiff.hpp"
#include "varsol/errors.hpp"
#include "varsol/expr.hpp"
#include "varsol/linalg.hpp"

namespace varsol {

// m fields defined implicitly by sum_i x_i F[a][i](phi1..phim) = c[a].
struct MultiFamilySpec {
  std::size_t m = 0, n = 0;
  std::vector<std::vector<Expression>> F;  // m rows of n expressions
  std::vector<double> c;
  std::vector<double> guess;  // initial iterate; zeros when empty
  std::string label;

  void validate() const {
    if (m == 0 || n == 0) throw ConfigError("multifield spec needs m >= 1 and n >= 1");
    if (F.size() != m) throw ConfigError("multifield F must have m rows");
    for (const auto& row : F) {
      if (row.size() != n) throw ConfigError("multifield F rows must have n entries");
      for (const auto& e : row)
        for (const auto& v : variables_of(e)) {
          bool ok = v.size() > 3 && v.compare(0, 3, "phi") == 0;
          std::size_t idx = 0;
          if (ok) {
            for (std::size_t p = 3; p < v.size(); ++p)
              if (v[p] < '0' || v[p] > '9') { ok = false; break; }
            if (ok) idx = std::stoul(v.substr(3));
          }
          if (!ok || idx < 1 || idx > m)
            throw ConfigError("multifield component references '" + v + "' outside phi1..phi" +
                              std::to_string(m));
        }
    }
    if (c.size() != m) throw ConfigError("constant vector must have length m");
    if (!guess.empty() && guess.size() != m)
      throw ConfigError("guess vector must have length m");
  }
};

inline MultiFamilySpec make_multifamily(std::size_t m, std::size_t n,
                                        const std::vector<std::vector<std::string>>& bodies,
                                        const std::vector<double>& c,
                                        std::vector<double> guess = {},
                                        std::string label = {}) {
  MultiFamilySpec spec;
  spec.m = m;
  spec.n = n;
  spec.F.resize(m);
  for (std::size_t a = 0; a < m && a < bodies.size(); ++a)
    for (const auto& b : bodies[a]) spec.F[a].push_back(parse_expression(b));
  spec.c = c;
  spec.guess = std::move(guess);
  spec.label = std::move(label);
  spec.validate();
  return spec;
}

struct MultiFieldSample {
  std::vector<double> x;
  std::vector<double> phi;    // length m
  Mat grad;                   // m x n, row a = gradient of field a
  std::vector<Mat> hess;      // m matrices, each n x n and symmetric
};

namespace detail {

inline std::vector<std::string> field_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < m; ++a) names.push_back("phi" + std::to_string(a + 1));
  return names;
}

// Jets of every F[a][i] with respect to the fields at the current iterate.
inline std::vector<std::vector<Jet2>> component_jets(const MultiFamilySpec& spec,
                                                     const std::vector<double>& phi) {
  std::vector<std::string> names = field_names(spec.m);
  Bindings env;
  for (std::size_t a = 0; a < spec.m; ++a) env[names[a]] = phi[a];
  std::vector<std::vector<Jet2>> jets(spec.m);
  for (std::size_t a = 0; a < spec.m; ++a)
    for (std::size_t i = 0; i < spec.n; ++i)
      jets[a].push_back(evaluate_jet2(spec.F[a][i], names, env));
  return jets;
}

inline Mat field_jacobian(const MultiFamilySpec& spec, const std::vector<double>& x,
                          const std::vector<std::vector<Jet2>>& jets) {
  Mat J(spec.m, spec.m);
  for (std::size_t a = 0; a < spec.m; ++a)
    for (std::size_t s = 0; s < spec.m; ++s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < spec.n; ++i) acc += x[i] * jets[a][i].grad(s);
      J(a, s) = acc;
    }
  return J;
}

}  // namespace detail

// Newton on the m constraint residuals with the m x m Jacobian
// sum_i x_i dF[a][i]/dphi[s]; same tolerance policy as the scalar solver.
inline std::vector<double> solve_fields(const MultiFamilySpec& spec,
                                        const std::vector<double>& x) {
  if (x.size() != spec.n) throw ConfigError("coordinate vector has wrong length");
  std::vector<double> phi = spec.guess.empty() ? std::vector<double>(spec.m, 0.0) : spec.guess;

  for (int it = 0; it <= 50; ++it) {
    auto jets = detail::component_jets(spec, phi);
    std::vector<double> r(spec.m);
    bool done = true;
    for (std::size_t a = 0; a < spec.m; ++a) {
      double acc = -spec.c[a];
      for (std::size_t i = 0; i < spec.n; ++i) acc += x[i] * jets[a][i].value();
      r[a] = acc;
      if (std::abs(acc) > 1e-12 * std::max(1.0, std::abs(spec.c[a]))) done = false;
    }
    if (done) return phi;
    if (it == 50) break;

    Lu f = lu_factor(detail::field_jacobian(spec, x, jets));
    if (f.singular) throw SingularJacobian("field Jacobian is singular at the iterate");
    for (auto& v : r) v = -v;
    std::vector<double> step = lu_solve(f, r);
    double sz = 0.0;
    for (std::size_t a = 0; a < spec.m; ++a) {
      phi[a] += step[a];
      sz = std::max(sz, std::abs(phi[a]));
    }
    if (sz > 1e8) throw NoConvergence("field iteration diverged");
  }
  throw NoConvergence("field iteration did not reach tolerance");
}

// Implicit first and second derivatives. Differentiating the constraints:
//   J phi._j  = -F._j
//   J phi._jk = -( H[a]_{st} phi^s_j phi^t_k + P_j phi._k + P_k phi._j )
// with J the field Jacobian, P_j the matrix dF[a][j]/dphi[s], and H[a] the
// x-weighted second derivative of row a.
inline MultiFieldSample sample_multifield(const MultiFamilySpec& spec,
                                          const std::vector<double>& x) {
  MultiFieldSample s;
  s.x = x;
  s.phi = solve_fields(spec, x);

  auto jets = detail::component_jets(spec, s.phi);
  Lu J = lu_factor(detail::field_jacobian(spec, x, jets));
  if (J.singular) throw SingularJacobian("field Jacobian is singular at the solution");

  const std::size_t m = spec.m, n = spec.n;
  s.grad = Mat(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> rhs(m);
    for (std::size_t a = 0; a < m; ++a) rhs[a] = -jets[a][j].value();
    std::vector<double> col = lu_solve(J, rhs);
    for (std::size_t a = 0; a < m; ++a) s.grad(a, j) = col[a];
  }

  // H[a](s,t) = sum_i x_i d2 F[a][i] / dphi_s dphi_t
  std::vector<Mat> H(m, Mat(m, m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t sg = 0; sg < m; ++sg)
      for (std::size_t t = 0; t < m; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i] * jets[a][i].hess(sg, t);
        H[a](sg, t) = acc;
      }

  s.hess.assign(m, Mat(n, n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      std::vector<double> rhs(m, 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        double acc = 0.0;
        for (std::size_t sg = 0; sg < m; ++sg) {
          for (std::size_t t = 0; t < m; ++t) acc += H[a](sg, t) * s.grad(sg, j) * s.grad(t, k);
          acc += jets[a][j].grad(sg) * s.grad(sg, k) + jets[a][k].grad(sg) * s.grad(sg, j);
        }
        rhs[a] = -acc;
      }
      std::vector<double> col = lu_solve(J, rhs);
      for (std::size_t a = 0; a < m; ++a) {
        s.hess[a](j, k) = col[a];
        s.hess[a](k, j) = col[a];
      }
    }
  return s;
}

// Lagrangian over the multifield gradient slots dA_J (field A, coordinate J).
struct MultiLagrangianSpec {
  std::size_t m = 0, n = 0;
  Expression body;
  std::string label;

  void validate() const {
    if (m == 0 || n == 0) throw ConfigError("multifield lagrangian needs m >= 1, n >= 1");
    for (const auto& v : variables_of(body)) {
      std::size_t us = v.find('_');
      bool ok = v.size() >= 4 && v[0] == 'd' && us != std::string::npos && us >= 2;
      std::size_t a = 0, j = 0;
      if (ok) {
        for (std::size_t p = 1; p < v.size(); ++p)
          if (p != us && (v[p] < '0' || v[p] > '9')) { ok = false; break; }
        if (ok) {
          a = std::stoul(v.substr(1, us - 1));
          j = std::stoul(v.substr(us + 1));
        }
      }
      if (!ok || a < 1 || a > m || j < 1 || j > n)
        throw ConfigError("multifield lagrangian references '" + v + "' outside d1_1..d" +
                          std::to_string(m) + "_" + std::to_string(n));
    }
  }
};

inline std::string slot_name(std::size_t a, std::size_t j) {
  return "d" + std::to_string(a + 1) + "_" + std::to_string(j + 1);
}

inline MultiLagrangianSpec make_multi_lagrangian(std::size_t m, std::size_t n,
                                                 const std::string& body,
                                                 std::string label = {}) {
  MultiLagrangianSpec L;
  L.m = m;
  L.n = n;
  L.body = parse_expression(body);
  L.label = label.empty() ? body : std::move(label);
  L.validate();
  return L;
}

// sqrt of the sum of squared m x m minors of the gradient matrix; the
// multifield analogue of companion(). Minor determinants are expanded over
// permutations into expression text.
inline MultiLagrangianSpec jacobian_companion(std::size_t m, std::size_t n) {
  if (m < 1 || m > n) throw ConfigError("jacobian_companion needs 1 <= m <= n");
  std::vector<std::size_t> cols(m);
  for (std::size_t a = 0; a < m; ++a) cols[a] = a;
  std::string sum;
  for (;;) {
    std::vector<std::size_t> perm(m);
    for (std::size_t a = 0; a < m; ++a) perm[a] = a;
    std::string det;
    do {
      int inv = 0;
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p + 1; q < m; ++q)
          if (perm[p] > perm[q]) ++inv;
      std::string term;
      for (std::size_t a = 0; a < m; ++a) {
        if (!term.empty()) term += "*";
        term += slot_name(a, cols[perm[a]]);
      }
      if (inv % 2 == 0) det += det.empty() ? term : "+" + term;
      else det += "-" + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!sum.empty()) sum += "+";
    sum += "(" + det + ")^2";

    // next m-subset of {0..n-1} in lexicographic order
    std::size_t a = m;
    while (a-- > 0) {
      if (cols[a] + 1 <= n - (m - a)) {
        ++cols[a];
        for (std::size_t b = a + 1; b < m; ++b) cols[b] = cols[b - 1] + 1;
        break;
      }
      if (a == 0) {
        return make_multi_lagrangian(m, n, "sqrt(" + sum + ")",
                                     "jacobian_companion(" + std::to_string(m) + "," +
                                         std::to_string(n) + ")");
      }
    }
  }
}

// Jet over all m*n slots, ordered d1_1..d1_n, d2_1..d2_n, ...
inline Jet2 multi_lagrangian_jet(const MultiLagrangianSpec& L, const Mat& grad) {
  if (grad.rows() != L.m || grad.cols() != L.n)
    throw ConfigError("gradient matrix has wrong shape");
  std::vector<std::string> active;
  Bindings env;
  for (std::size_t a = 0; a < L.m; ++a)
    for (std::size_t j = 0; j < L.n; ++j) {
      active.push_back(slot_name(a, j));
      env[active.back()] = grad(a, j);
    }
  return evaluate_jet2(L.body, active, env);
}

// defect_{ab} = sum_j grad(a,j) dL/d(d b_j) - delta_{ab} L.
inline Mat orthogonality_defect(const MultiLagrangianSpec& L, const Mat& grad) {
  Jet2 jet = multi_lagrangian_jet(L, grad);
  Mat defect(L.m, L.m);
  for (std::size_t a = 0; a < L.m; ++a)
    for (std::size_t b = 0; b < L.m; ++b) {
      double acc = a == b ? -jet.value() : 0.0;
      for (std::size_t j = 0; j < L.n; ++j) acc += grad(a, j) * jet.grad(b * L.n + j);
      defect(a, b) = acc;
    }
  return defect;
}

inline Mat orthogonality_defect(const MultiLagrangianSpec& L, const MultiFieldSample& s) {
  return orthogonality_defect(L, s.grad);
}

// Differentiating the orthogonality relations once more in the slots gives
//   sum_j grad(a,j) d2L/d(d b_j)d(d g_k) + delta_{ag} dL/d(d b_k)
//                                        - delta_{ab} dL/d(d g_k) = 0;
// returns the worst entry, normalized by the slot-Hessian norm.
inline Residual differentiated_orthogonality_defect(const MultiLagrangianSpec& L,
                                                    const Mat& grad) {
  Jet2 jet = multi_lagrangian_jet(L, grad);
  double h2 = 0.0;
  const std::size_t mn = L.m * L.n;
  for (std::size_t p = 0; p < mn; ++p)
    for (std::size_t q = 0; q < mn; ++q) h2 += jet.hess(p, q) * jet.hess(p, q);
  double worst = 0.0;
  for (std::size_t a = 0; a < L.m; ++a)
    for (std::size_t b = 0; b < L.m; ++b)
      for (std::size_t g = 0; g < L.m; ++g)
        for (std::size_t k = 0; k < L.n; ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < L.n; ++j)
            acc += grad(a, j) * jet.hess(b * L.n + j, g * L.n + k);
          if (a == g) acc += jet.grad(b * L.n + k);
          if (a == b) acc -= jet.grad(g * L.n + k);
          worst = std::max(worst, std::abs(acc));
        }
  double scale = std::sqrt(h2) + 1e-30;
  return {worst, worst / scale};
}

// residual_a = sum_b sum_jk hess[b](j,k) d2L/d(d a_j)d(d b_k), one per field.
inline std::vector<Residual> multifield_el_residual(const MultiLagrangianSpec& L,
                                                    const MultiFieldSample& s) {
  Jet2 jet = multi_lagrangian_jet(L, s.grad);
  const std::size_t m = L.m, n = L.n;
  double h2 = 0.0;
  for (std::size_t p = 0; p < m * n; ++p)
    for (std::size_t q = 0; q < m * n; ++q) h2 += jet.hess(p, q) * jet.hess(p, q);
  double hs2 = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    double f = frobenius(s.hess[b]);
    hs2 += f * f;
  }
  const double scale = std::sqrt(h2) * std::sqrt(hs2) + 1e-30;

  std::vector<Residual> out(m);
  for (std::size_t a = 0; a < m; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          acc += s.hess[b](j, k) * jet.hess(a * n + j, b * n + k);
    out[a] = {acc, acc / scale};
  }
  return out;
}

// Least-squares fit of a single vector G to hess[b](j,k) =
// grad(b,j) G_k + grad(b,k) G_j over all fields and index pairs; the
// returned value is the relative misfit, 0 when the structure holds.
inline double structure_defect(const MultiFieldSample& s) {
  const std::size_t m = s.grad.rows(), n = s.grad.cols();
  double gnorm = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t j = 0; j < n; ++j) gnorm = std::max(gnorm, std::abs(s.grad(a, j)));
  if (gnorm == 0.0) throw DegenerateFit("all field gradients vanish");

  // Each field's Hessian must be a symmetrized product over ALL field
  // gradients, hess[a] = sum_c (w_c grad_c^T + grad_c w_c^T), with free
  // coefficient vectors w_c; the fits decouple across fields. Off-diagonal
  // rows carry sqrt(2) so the residual is a genuine Frobenius distance.
  const std::size_t rows = n * (n + 1) / 2;
  const double rt2 = std::sqrt(2.0);
  double res2 = 0.0, b2 = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    Mat A(rows, m * n);
    std::vector<double> b(rows);
    std::size_t r = 0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k, ++r) {
        const double w = j == k ? 1.0 : rt2;
        for (std::size_t c = 0; c < m; ++c) {
          A(r, c * n + k) += w * s.grad(c, j);
          A(r, c * n + j) += w * s.grad(c, k);
        }
        b[r] = w * s.hess[a](j, k);
      }
    std::vector<double> W = least_squares(A, b);
    std::vector<double> fit = A.apply(W);
    for (std::size_t i = 0; i < rows; ++i) {
      res2 += (fit[i] - b[i]) * (fit[i] - b[i]);
      b2 += b[i] * b[i];
    }
  }
  return std::sqrt(res2) / (std::sqrt(b2) + 1e-30);
}

}  // namespace varsol
