// End-to-end acceptance gate: one line per shipped guarantee, nonzero exit
// if any of them fails. Tolerances here are the published ones, not the
// (tighter) ones the unit suite uses internally.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "varsol/varsol.hpp"

using namespace varsol;

namespace {

bool all_ok = true;

void line(int k, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) all_ok = false;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// --- 1: stationarity of every pool density along every pool family ---
void criterion_1() {
  Campaign c = default_campaign(42);
  c.suite = "single";
  c.samples = 50;
  auto t0 = std::chrono::steady_clock::now();
  CampaignResult res = run_campaign(c);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t count = 0, fails = 0;
  double worst = 0.0;
  std::set<std::string> families, densities;
  for (const auto& r : res.records) {
    if (r.check.rfind("el:", 0) != 0 || r.status == "skip") continue;
    ++count;
    families.insert(r.scenario);
    densities.insert(r.check);
    worst = std::max(worst, std::abs(r.normalized));
    if (std::abs(r.normalized) > 1e-8) ++fails;
  }
  bool pass = fails == 0 && count >= 200 && families.size() >= 9 && densities.size() >= 12 &&
              secs <= 10.0;
  line(1, pass,
       fmt("(%zu stationarity checks, %zu families x %zu densities, worst %.2e, tol 1e-8, "
           "%.2f s)",
           count, families.size(), densities.size(), worst, secs));
}

// --- 2: negative controls stay loud ---
void criterion_2() {
  // (a) a non-homogeneous density along genuine implicit fields
  Campaign c = default_campaign(42);
  c.suite = "single";
  c.samples = 40;
  std::vector<Scenario> keep;
  for (auto& sc : c.scenarios)
    if (!sc.multi && sc.family.n == 2) keep.push_back(sc);
  c.scenarios = keep;
  c.lagrangians = {make_lagrangian(2, "g1^2+g2^2", "bad")};
  c.mlagrangians.clear();
  CampaignResult res = run_campaign(c);
  std::size_t n_el = 0, loud_el = 0;
  for (const auto& r : res.records)
    if (r.check.rfind("el:", 0) == 0 && r.status != "skip") {
      ++n_el;
      if (std::abs(r.normalized) > 1e-3) ++loud_el;
    }

  // (b) explicit fields that solve no such constraint
  std::size_t n_ctrl = 0, loud_ctrl = 0;
  LagrangianSpec iso = companion(2);
  for (const std::string& body : {"x1*x2", "x1^2+x2^2"}) {
    Rng rng(mix_seed(2026, 2, body.size()));
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
      FieldSample s = builtins::field_from_expression(body, x);
      n_ctrl += 2;
      if (std::abs(el_residual(iso, s).normalized) > 1e-3) ++loud_ctrl;
      if (std::abs(universal_field_residual(s).normalized) > 1e-3) ++loud_ctrl;
    }
  }
  bool pass = n_el >= 100 && 20 * loud_el >= 19 * n_el && n_ctrl >= 200 &&
              20 * loud_ctrl >= 19 * n_ctrl;
  line(2, pass,
       fmt("(non-homogeneous density: %zu/%zu > 1e-3; control fields: %zu/%zu > 1e-3)",
           loud_el, n_el, loud_ctrl, n_ctrl));
}

// --- 3: closed-form derivatives against finite differences ---
void criterion_3() {
  struct Case {
    FamilySpec fam;
    std::vector<double> x;
  };
  std::vector<Case> cases;
  cases.push_back({make_family(2, {"phi", "phi^2"}, 4.0, {{0.05, 3.0}}), {1.1, 0.9}});
  cases.push_back({make_family(2, {"phi", "phi^2"}, 4.0, {{0.05, 3.0}}), {0.8, 1.3}});
  cases.push_back(
      {make_family(2, {"exp(phi)", "1+phi"}, 4.0, {{0.05, 3.0}}), {0.8, 1.2}});
  cases.push_back(
      {make_family(3, {"phi", "phi^2", "exp(phi)"}, 5.0, {{0.05, 2.0}}), {1.0, 0.9, 1.1}});

  double worst = 0.0;
  for (const auto& cs : cases) {
    FdReport rep = check_sample_fd(cs.fam, cs.x, 1e-5);
    worst = std::max({worst, rep.grad_rel_err, rep.hess_rel_err});
  }

  std::vector<double> hs{1e-2, 3e-3, 1e-3}, ge, he;
  for (double h : hs) {
    FdReport rep = check_sample_fd(cases[0].fam, {1.2, 0.8}, h);
    ge.push_back(rep.grad_rel_err);
    he.push_back(rep.hess_rel_err);
  }
  double sg = support::loglog_slope(hs, ge);
  double sh = support::loglog_slope(hs, he);
  bool pass = worst <= 1e-6 && std::abs(sg - 2.0) <= 0.2 && std::abs(sh - 2.0) <= 0.2;
  line(3, pass,
       fmt("(worst FD mismatch %.2e at h=1e-5, tol 1e-6; observed orders %.2f / %.2f)", worst,
           sg, sh));
}

// --- 4: homogeneity identities over the density pools ---
void criterion_4() {
  Campaign c = default_campaign(42);
  c.suite = "homogeneity";
  c.samples = 100;
  CampaignResult res = run_campaign(c);
  std::size_t w1 = 0, nv = 0, dorth = 0;
  for (const auto& r : res.records) {
    if (r.status == "skip") continue;
    if (r.check == "weight_one") ++w1;
    if (r.check == "hessian_nullvector") ++nv;
    if (r.check == "differentiated_orthogonality") ++dorth;
  }
  bool pass = res.failed == 0 && w1 >= 1200 && nv >= 1200 && dorth >= 100;
  line(4, pass,
       fmt("(%zu weight-one, %zu null-vector, %zu differentiated-orthogonality checks, 0 "
           "expected failures: %zu failed)",
           w1, nv, dorth, res.failed));
}

// --- 5: simultaneous fields ---
void criterion_5() {
  Campaign c = default_campaign(42);
  c.suite = "multi";
  c.samples = 60;
  CampaignResult res = run_campaign(c);
  std::size_t el = 0, st = 0;
  double worst = 0.0;
  for (const auto& r : res.records) {
    if (r.status == "skip") continue;
    if (r.check.rfind("multifield_el:", 0) == 0) {
      ++el;
      worst = std::max(worst, std::abs(r.normalized));
    }
    if (r.check == "structure") ++st;
  }
  bool pass = res.failed == 0 && el >= 100 && st >= 100;
  line(5, pass,
       fmt("(%zu stationarity + %zu structure checks, worst %.2e, tol 1e-7, %zu failed)", el,
           st, worst, res.failed));
}

// --- 6: the contraction hierarchy ---
void criterion_6() {
  // order zero reproduces the el second-order term exactly
  double worst0 = 0.0;
  Rng rng(139);
  for (int i = 0; i < 20; ++i) {
    for (std::size_t n : {std::size_t(2), std::size_t(3)}) {
      FieldSample s = support::random_sample(n, rng);
      for (const auto& L : builtins::pool_lagrangians(n)) {
        double a = generic_residual({0, {L}}, s).raw;
        double b = el_residual(L, s).raw;
        worst0 = std::max(worst0, std::abs(a - b) / std::max(1e-30, std::abs(b)));
      }
    }
  }

  // the full ladder on implicit fields, n = 2 and 3
  Campaign c = default_campaign(42);
  c.suite = "hierarchy";
  c.samples = 40;
  CampaignResult res = run_campaign(c);
  std::size_t orders = 0;
  for (const auto& r : res.records)
    if (r.status != "skip" && r.check.rfind("order", 0) == 0) ++orders;

  // the two-dimensional contraction is the curved-wave operator over |g|^3
  double worstk = 0.0;
  LagrangianSpec iso = companion(2);
  for (int i = 0; i < 30; ++i) {
    FieldSample s = support::random_sample(2, rng);
    double kappa = std::pow(dot(s.grad, s.grad), -1.5);
    double a = generic_residual({0, {iso}}, s).raw;
    double b = kappa * universal_field_residual(s).raw;
    worstk = std::max(worstk, std::abs(a - b) / std::max(1e-30, std::abs(a)));
  }
  bool pass = worst0 <= 1e-12 && res.failed == 0 && orders >= 500 && worstk <= 1e-8;
  line(6, pass,
       fmt("(order-0 vs direct term %.1e; %zu ladder checks, %zu failed; wave-operator match "
           "%.1e)",
           worst0, orders, res.failed, worstk));
}

// --- 7: density independence of the top nonvanishing order ---
void criterion_7() {
  bool pass = true;
  double worst_univ = 0.0;
  std::size_t loud = 0, total = 0;

  FamilySpec f2 = make_family(2, {"phi", "phi^2"}, 4.0, {{0.05, 3.0}});
  FamilySpec f3 = make_family(3, {"phi", "phi^2", "exp(phi)"}, 5.0, {{0.05, 2.0}});
  std::vector<LagrangianSpec> two{companion(2), make_lagrangian(2, "g1^2/g2", "rational(2)")};
  std::vector<LagrangianSpec> three{companion(3), builtins::pool_lagrangians(3)[2]};

  Rng rng(149);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x2{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    FieldSample s2 = sample_field(f2, x2);
    for (const auto& L : two)
      worst_univ = std::max(worst_univ, std::abs(generic_residual({0, {L}}, s2).normalized));
    std::vector<double> x3{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                           rng.uniform(0.5, 1.5)};
    FieldSample s3 = sample_field(f3, x3);
    for (const auto& L : three)
      worst_univ =
          std::max(worst_univ, std::abs(generic_residual({1, {L, L}}, s3).normalized));
  }
  pass = pass && worst_univ <= 1e-7;

  for (int i = 0; i < 100; ++i) {
    std::vector<double> x2{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    FieldSample c2 = builtins::field_from_expression("x1*x2", x2);
    for (const auto& L : two) {
      ++total;
      if (std::abs(generic_residual({0, {L}}, c2).normalized) > 1e-3) ++loud;
    }
    std::vector<double> x3{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                           rng.uniform(0.5, 1.5)};
    FieldSample c3 = builtins::field_from_expression("x1*x2+x3^2", x3);
    for (const auto& L : three) {
      ++total;
      if (std::abs(generic_residual({1, {L, L}}, c3).normalized) > 1e-3) ++loud;
    }
  }
  pass = pass && 20 * loud >= 19 * total;
  line(7, pass,
       fmt("(two densities per dimension: universal worst %.2e vs tol 1e-7; control %zu/%zu "
           "> 1e-3)",
           worst_univ, loud, total));
}

// --- 8: first-order reductions ---
void criterion_8() {
  Campaign c = default_campaign(42);
  c.suite = "firstorder";
  c.samples = 50;
  CampaignResult res = run_campaign(c);
  std::size_t pairs = 0;
  double worst = 0.0;
  for (const auto& r : res.records)
    if (r.status != "skip") {
      ++pairs;
      worst = std::max(worst, std::abs(r.normalized));
    }
  bool pass = res.failed == 0 && pairs >= 500;
  line(8, pass, fmt("(%zu pair checks, worst %.2e, %zu failed)", pairs, worst, res.failed));
}

// --- 9: reproducibility ---
void criterion_9() {
  Campaign c = default_campaign(123);
  c.suite = "all";
  c.samples = 6;
  std::string d1 = report_json(c, run_campaign(c)).dump(2);
  std::string d2 = report_json(c, run_campaign(c)).dump(2);
  bool pass = d1 == d2 && d1.size() > 1000;
  line(9, pass, fmt("(two %zu-byte reports, byte-identical: %s)", d1.size(),
                    d1 == d2 ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%s\n", all_ok ? "acceptance: all criteria satisfied"
                             : "acceptance: FAILURES above");
  return all_ok ? 0 : 1;
}
