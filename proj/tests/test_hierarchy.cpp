#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "varsol/builtins.hpp"
#include "varsol/hierarchy.hpp"

using namespace varsol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Dense tuple-sum reference for the two-factor contraction: all ordered
// index pairs, 2x2 determinant of hess taken in tuple order. O(n^4) and
// utterly direct, so it cross-checks the subset-grouped implementation.
double two_factor_reference(const Mat& m1, const Mat& m2, const Mat& h) {
  const std::size_t n = h.rows();
  double acc = 0.0;
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2)
      for (std::size_t j1 = 0; j1 < n; ++j1)
        for (std::size_t j2 = 0; j2 < n; ++j2)
          acc += m1(i1, j1) * m2(i2, j2) *
                 (h(i1, j1) * h(i2, j2) - h(i1, j2) * h(i2, j1));
  return acc;
}

double frob_inner(const Mat& a, const Mat& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(i, j);
  return acc;
}

}  // namespace

TEST_CASE("order zero is the plain Hessian contraction") {
  Rng rng(83);
  LagrangianSpec L = companion(3);
  for (int i = 0; i < 20; ++i) {
    FieldSample s = support::random_sample(3, rng);
    HierarchyOrder order{0, {L}};
    Residual r = generic_residual(order, s);
    Mat M = gradient_hessian(L, s.grad, s.phi);
    double direct = frob_inner(M, s.hess);
    CHECK_THAT(r.raw, WithinRel(direct, 1e-12));
    // ... and therefore matches the second-order term of el_residual for a
    // phi-independent density (whose phi couplings vanish identically).
    Residual el = el_residual(L, s);
    CHECK_THAT(r.raw, WithinRel(el.raw, 1e-12));
  }
}

TEST_CASE("two-factor contraction agrees with dense and closed matrix forms") {
  Rng rng(89);
  LagrangianSpec L1 = companion(3);
  LagrangianSpec L2 = make_lagrangian(3, "g1^2/g2", "rational(3)");
  for (int i = 0; i < 15; ++i) {
    FieldSample s = support::random_sample(3, rng);
    Mat M1 = gradient_hessian(L1, s.grad, s.phi);
    Mat M2 = gradient_hessian(L2, s.grad, s.phi);

    HierarchyOrder order{1, {L1, L2}};
    Residual r = generic_residual(order, s);

    double dense = two_factor_reference(M1, M2, s.hess);
    // (M1:H)(M2:H) - tr(M1 H M2 H)
    Mat prod = M1 * s.hess * M2 * s.hess;
    double tr = 0.0;
    for (std::size_t a = 0; a < 3; ++a) tr += prod(a, a);
    double closed = frob_inner(M1, s.hess) * frob_inner(M2, s.hess) - tr;

    CHECK_THAT(r.raw, WithinRel(dense, 1e-11));
    CHECK_THAT(r.raw, WithinRel(closed, 1e-11));
  }
}

TEST_CASE("factor order does not change the contraction") {
  Rng rng(97);
  LagrangianSpec L1 = companion(3);
  LagrangianSpec L2 = make_lagrangian(3, "sqrt(g3^2)*(1+(g1/g3)^2+(g2/g3)^2)", "cone");
  FieldSample s = support::random_sample(3, rng);
  Residual fwd = generic_residual({1, {L1, L2}}, s);
  Residual rev = generic_residual({1, {L2, L1}}, s);
  CHECK_THAT(fwd.raw, WithinRel(rev.raw, 1e-12));
}

TEST_CASE("order-zero companion contraction is the second-order form over |g|^3") {
  // M = (|g|^2 I - g g^T)/|g|^3 turns the r=0 contraction into
  // (g2^2 h11 - 2 g1 g2 h12 + g1^2 h22) / |g|^3 identically at n = 2.
  Rng rng(101);
  LagrangianSpec L = companion(2);
  for (int i = 0; i < 25; ++i) {
    FieldSample s = support::random_sample(2, rng);
    double kappa = std::pow(dot(s.grad, s.grad), -1.5);
    Residual r0 = generic_residual({0, {L}}, s);
    Residual second = universal_field_residual(s);
    CHECK_THAT(r0.raw, WithinRel(kappa * second.raw, 1e-10));
  }
}

TEST_CASE("weight-one factors annihilate the top order on any sample") {
  // With n factors each having the gradient as a Hessian null vector, the
  // coefficient of every determinant is a mixed discriminant of matrices
  // sharing a null space: identically zero, universal sample or not.
  Rng rng(103);
  for (int i = 0; i < 20; ++i) {
    FieldSample s2 = support::random_sample(2, rng);
    Residual top2 = generic_residual({1, {companion(2), companion(2)}}, s2);
    CHECK(std::abs(top2.normalized) <= 1e-13);
    Residual mixed2 = generic_residual(
        {1, {companion(2), make_lagrangian(2, "g1^2/g2", "rational(2)")}}, s2);
    CHECK(std::abs(mixed2.normalized) <= 1e-13);

    FieldSample s3 = support::random_sample(3, rng);
    Residual top3 =
        generic_residual({2, {companion(3), companion(3), companion(3)}}, s3);
    CHECK(std::abs(top3.normalized) <= 1e-12);
  }
  // a non-weight-one factor breaks the annihilation
  FieldSample ctrl = builtins::field_from_expression("x1*x2", {1.0, 1.0});
  LagrangianSpec bad = make_lagrangian(2, "g1^2+g2^2", "quad");
  Residual r = generic_residual({1, {bad, bad}}, ctrl);
  CHECK(std::abs(r.raw) > 1.0);  // 2 det(2I) det(H) = -8 here
  CHECK_THAT(r.raw, WithinAbs(-8.0, 1e-12));
}

TEST_CASE("second-order form on explicit control fields") {
  FieldSample prod = builtins::field_from_expression("x1*x2", {1.0, 1.0});
  Residual rp = universal_field_residual(prod);
  CHECK(rp.raw == -2.0);
  CHECK(std::abs(rp.normalized) > 1e-3);

  // three-dimensional control: x1*x2 + x3^2 at (1,1,1) has the frozen value
  // -4/9 for the two-companion contraction.
  FieldSample c3 = builtins::field_from_expression("x1*x2+x3^2", {1.0, 1.0, 1.0});
  Residual r3 = universal_field_residual(c3);
  CHECK_THAT(r3.raw, WithinRel(-4.0 / 9.0, 1e-12));
  CHECK_THAT(r3.normalized, WithinRel(-2.0 / 9.0, 1e-12));

  // closed-form cross-check of the same value:
  // |g|^2 ((tr H)^2 - tr(H^2)) - 2 tr(H) g^T H g + 2 g^T H^2 g over |g|^4
  double g2 = dot(c3.grad, c3.grad);
  double trh = 0.0, trh2 = 0.0;
  for (std::size_t a = 0; a < 3; ++a) trh += c3.hess(a, a);
  Mat hh = c3.hess * c3.hess;
  for (std::size_t a = 0; a < 3; ++a) trh2 += hh(a, a);
  std::vector<double> hg = c3.hess.apply(c3.grad);
  double ghg = dot(c3.grad, hg);
  double gh2g = dot(hg, hg);
  double ufe = g2 * (trh * trh - trh2) - 2.0 * trh * ghg + 2.0 * gh2g;
  CHECK_THAT(ufe, WithinAbs(-16.0, 1e-12));
  CHECK_THAT(r3.raw, WithinRel(ufe / (g2 * g2), 1e-12));
}

TEST_CASE("every order vanishes along implicit universal fields") {
  FamilySpec fam = make_family(3, {"phi", "phi^2", "1+phi"}, 3.0, {{0.05, 3.0}});
  std::vector<LagrangianSpec> pool = builtins::pool_lagrangians(3);
  Rng rng(107);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                          rng.uniform(0.5, 1.5)};
    FieldSample s = sample_field(fam, x);
    for (std::size_t r = 0; r < 3; ++r) {
      for (const auto& L : pool) {
        Residual same = generic_residual({r, std::vector<LagrangianSpec>(r + 1, L)}, s);
        CHECK(std::abs(same.normalized) <= 1e-9);
      }
      HierarchyOrder mixed;
      mixed.r = r;
      for (std::size_t a = 0; a <= r; ++a) mixed.lagrangians.push_back(pool[a]);
      Residual rm = generic_residual(mixed, s);
      CHECK(std::abs(rm.normalized) <= 1e-9);
    }
    Residual u = universal_field_residual(s);
    CHECK(std::abs(u.normalized) <= 1e-9);
  }
}

TEST_CASE("hierarchy input validation") {
  Rng rng(109);
  FieldSample s = support::random_sample(2, rng);
  CHECK_THROWS_AS(generic_residual({2, {companion(2), companion(2), companion(2)}}, s),
                  ConfigError);  // r+1 > n
  CHECK_THROWS_AS(generic_residual({1, {companion(2)}}, s), ConfigError);  // count
  CHECK_THROWS_AS(generic_residual({0, {companion(3)}}, s), ConfigError);  // dim
}
