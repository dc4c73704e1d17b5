#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "varsol/autodiff.hpp"
#include "varsol/errors.hpp"
#include "varsol/expr.hpp"
#include "varsol/linalg.hpp"

namespace varsol {

// A field defined implicitly by sum_j x_j F_j(phi) = c. Each F_j is an
// expression in the single variable `phi`; bracket/guess select the branch
// when the constraint has several roots.
struct FamilySpec {
  std::size_t n = 0;
  std::vector<Expression> F;
  double c = 0.0;
  std::optional<std::pair<double, double>> bracket;
  std::optional<double> guess;
  std::string label;

  void validate() const {
    if (n == 0) throw ConfigError("family needs at least one coordinate");
    if (F.size() != n) throw ConfigError("family has " + std::to_string(F.size()) +
                                         " component functions for n=" + std::to_string(n));
    for (const auto& f : F)
      for (const auto& v : variables_of(f))
        if (v != "phi")
          throw ConfigError("family component references '" + v + "' (only 'phi' allowed)");
    if (bracket && !(bracket->first < bracket->second))
      throw ConfigError("bracket must satisfy lo < hi");
  }
};

inline FamilySpec make_family(std::size_t n, const std::vector<std::string>& bodies, double c,
                              std::optional<std::pair<double, double>> bracket = {},
                              std::optional<double> guess = {}, std::string label = {}) {
  FamilySpec fam;
  fam.n = n;
  fam.F.reserve(bodies.size());
  for (const auto& b : bodies) fam.F.push_back(parse_expression(b));
  fam.c = c;
  fam.bracket = bracket;
  fam.guess = guess;
  fam.label = std::move(label);
  fam.validate();
  return fam;
}

// The field value plus everything its implicit derivatives need downstream.
struct FieldSample {
  std::vector<double> x;
  double phi = 0.0;
  std::vector<double> grad;
  Mat hess;
  double denom = 0.0;  // sum_i x_i F_i'(phi), recorded for diagnostics
};

namespace detail {

struct Constraint1D {
  double value = 0.0;  // sum_j x_j F_j(phi) - c
  double deriv = 0.0;  // sum_j x_j F_j'(phi)
};

inline Constraint1D constraint_at(const FamilySpec& fam, const std::vector<double>& x,
                                  double phi) {
  Constraint1D r;
  r.value = -fam.c;
  for (std::size_t j = 0; j < fam.n; ++j) {
    Derivatives1D d = derivatives_1d(fam.F[j], "phi", phi);
    r.value += x[j] * d.value;
    r.deriv += x[j] * d.first;
  }
  return r;
}

}  // namespace detail

// Safeguarded scalar Newton for the branch selected by guess/bracket:
// Newton steps clipped into the live bracket (shrunk as evaluations land),
// bisection fallback when Newton stalls. Deterministic in (family, x).
inline double solve_phi(const FamilySpec& fam, const std::vector<double>& x,
                        std::optional<double> guess_override = {}) {
  if (x.size() != fam.n) throw ConfigError("coordinate vector has wrong length");
  const double tol = 1e-12 * std::max(1.0, std::abs(fam.c));

  bool all_zero = true;
  for (double xi : x) all_zero = all_zero && xi == 0.0;
  if (all_zero) throw NoConvergence("constraint independent of phi at x = 0");

  bool have_bracket = fam.bracket.has_value();
  double lo = 0.0, hi = 0.0, flo = 0.0;
  if (have_bracket) {
    lo = fam.bracket->first;
    hi = fam.bracket->second;
    flo = detail::constraint_at(fam, x, lo).value;
    double fhi = detail::constraint_at(fam, x, hi).value;
    if (std::abs(flo) <= tol) return lo;
    if (std::abs(fhi) <= tol) return hi;
    if (flo * fhi > 0.0) throw NoConvergence("bracket does not straddle a root");
  }

  double phi = guess_override ? *guess_override
             : fam.guess      ? *fam.guess
             : have_bracket   ? 0.5 * (lo + hi)
                              : 1.0;
  if (have_bracket) phi = std::clamp(phi, lo, hi);

  for (int it = 0; it < 50; ++it) {
    detail::Constraint1D c = detail::constraint_at(fam, x, phi);
    if (std::abs(c.value) <= tol) return phi;
    if (have_bracket) {
      if ((c.value > 0.0) == (flo > 0.0)) { lo = phi; flo = c.value; }
      else hi = phi;
    }
    double scale = 0.0;
    for (std::size_t j = 0; j < fam.n; ++j) scale = std::max(scale, std::abs(x[j]));
    bool flat = std::abs(c.deriv) <= 1e-14 * std::max(1.0, scale);
    double next;
    if (flat) {
      if (!have_bracket) throw Singular("constraint derivative vanished at iterate");
      next = 0.5 * (lo + hi);
    } else {
      next = phi - c.value / c.deriv;
      if (have_bracket && (next <= lo || next >= hi)) next = 0.5 * (lo + hi);
    }
    phi = next;
  }

  if (have_bracket) {
    for (int it = 0; it < 128; ++it) {
      phi = 0.5 * (lo + hi);
      double f = detail::constraint_at(fam, x, phi).value;
      if (std::abs(f) <= tol) return phi;
      if ((f > 0.0) == (flo > 0.0)) { lo = phi; flo = f; }
      else hi = phi;
    }
  }
  throw NoConvergence("root iteration did not reach tolerance");
}

inline double denominator(const FamilySpec& fam, const std::vector<double>& x, double phi) {
  return detail::constraint_at(fam, x, phi).deriv;
}

// First and second derivatives of the implicit field. With
// D = sum_i x_i F_i'(phi) and S2 = sum_i x_i F_i''(phi):
//   phi_j  = -F_j / D
//   phi_jk = -(phi_j F_k' + phi_k F_j')/D - phi_j phi_k S2/D
// (symmetric in j,k by inspection).
inline FieldSample sample_field(const FamilySpec& fam, const std::vector<double>& x,
                                std::optional<double> guess_override = {}) {
  FieldSample s;
  s.x = x;
  s.phi = solve_phi(fam, x, guess_override);

  const std::size_t n = fam.n;
  std::vector<double> f(n), fp(n), fpp(n);
  double fmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Derivatives1D d = derivatives_1d(fam.F[j], "phi", s.phi);
    f[j] = d.value;
    fp[j] = d.first;
    fpp[j] = d.second;
    fmax = std::max(fmax, std::abs(f[j]));
  }
  double D = 0.0, S2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    D += x[j] * fp[j];
    S2 += x[j] * fpp[j];
  }
  const double floor = 1e-8 * fmax * std::max(1.0, norm2(x));
  if (std::abs(D) <= floor)
    throw Singular("implicit-derivative denominator below singularity floor");

  s.denom = D;
  s.grad.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.grad[j] = -f[j] / D;
  s.hess = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      double v = -(s.grad[j] * fp[k] + s.grad[k] * fp[j]) / D -
                 s.grad[j] * s.grad[k] * S2 / D;
      s.hess(j, k) = v;
      s.hess(k, j) = v;
    }
  return s;
}

// Cross-check of the closed-form derivatives against central finite
// differences: grad against re-solves of the constraint, hess against the
// analytic gradient at stencil points. Stencil solves are seeded with the
// center phi so every evaluation stays on the same branch.
struct FdReport {
  double grad_rel_err = 0.0;
  double hess_rel_err = 0.0;
  double h = 0.0;
};

inline FdReport check_sample_fd(const FamilySpec& fam, const std::vector<double>& x,
                                double h = 1e-5) {
  FieldSample s = sample_field(fam, x);
  const std::size_t n = fam.n;
  FdReport rep;
  rep.h = h;

  double gscale = 0.0, hscale = 0.0;
  for (std::size_t j = 0; j < n; ++j) gscale = std::max(gscale, std::abs(s.grad[j]));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) hscale = std::max(hscale, std::abs(s.hess(j, k)));
  gscale = std::max(gscale, 1e-300);
  hscale = std::max(hscale, 1e-300);

  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    double fd = (solve_phi(fam, xp, s.phi) - solve_phi(fam, xm, s.phi)) / (2.0 * h);
    rep.grad_rel_err = std::max(rep.grad_rel_err, std::abs(fd - s.grad[j]) / gscale);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    FieldSample sp = sample_field(fam, xp, s.phi);
    FieldSample sm = sample_field(fam, xm, s.phi);
    for (std::size_t j = 0; j < n; ++j) {
      double fd = (sp.grad[j] - sm.grad[j]) / (2.0 * h);
      rep.hess_rel_err = std::max(rep.hess_rel_err, std::abs(fd - s.hess(j, k)) / hscale);
    }
  }
  return rep;
}

}  // namespace varsol
