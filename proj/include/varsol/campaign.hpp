#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "varsol/builtins.hpp"
#include "varsol/errors.hpp"
#include "varsol/firstorder.hpp"
#include "varsol/hierarchy.hpp"
#include "varsol/implicit.hpp"
#include "varsol/lagrangian.hpp"
#include "varsol/multifield.hpp"
#include "varsol/rng.hpp"

namespace varsol {

struct Scenario {
  std::string id;
  bool multi = false;
  FamilySpec family;
  MultiFamilySpec mfamily;
};

// A full verification run: which suite(s), over which scenarios and
// Lagrangian pools, how many sample points, and under which seed.
struct Campaign {
  std::string suite = "all";
  std::uint64_t seed = 42;
  std::size_t samples = 50;
  std::pair<double, double> box{0.5, 1.5};
  std::map<std::string, double> tolerance;  // per-check overrides
  std::optional<double> tol_override;       // global override; wins over all
  std::vector<Scenario> scenarios;
  std::vector<LagrangianSpec> lagrangians;
  std::vector<MultiLagrangianSpec> mlagrangians;

  double tol(const std::string& check_class, double dflt) const {
    if (tol_override) return *tol_override;
    auto it = tolerance.find(check_class);
    return it == tolerance.end() ? dflt : it->second;
  }

  bool runs(const std::string& s) const { return suite == "all" || suite == s; }

  void validate() const {
    static const std::set<std::string> suites{"single",     "multi",       "hierarchy",
                                              "firstorder", "homogeneity", "all"};
    if (!suites.count(suite)) throw ConfigError("unknown suite '" + suite + "'");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (!(box.first < box.second)) throw ConfigError("box must satisfy lo < hi");
    for (const auto& [name, t] : tolerance)
      if (!(t > 0.0)) throw ConfigError("tolerance per '" + name + "' must be positive");
    std::set<std::string> ids;
    for (const auto& sc : scenarios) {
      if (sc.id.empty()) throw ConfigError("scenario id must be nonempty");
      if (!ids.insert(sc.id).second) throw ConfigError("duplicate scenario id '" + sc.id + "'");
      if (sc.multi) sc.mfamily.validate();
      else sc.family.validate();
    }
    for (const auto& L : lagrangians) L.validate();
    for (const auto& L : mlagrangians) L.validate();
  }
};

struct Record {
  std::string scenario;
  std::size_t sample = 0;
  std::string check;
  std::string suite;
  std::vector<double> x;
  double raw = 0.0;
  double normalized = 0.0;
  double tolerance = 0.0;
  std::string status;  // pass | fail | skip
  std::string error;   // tag when skipped
};

struct CampaignResult {
  std::vector<Record> records;
  std::size_t passed = 0, failed = 0, skipped = 0;
  std::vector<std::string> flagged;  // suite:scenario with skip fraction >= 1/2
  std::map<std::string, double> max_normalized;

  int exit_code() const { return failed ? 1 : (flagged.empty() ? 0 : 3); }
};

namespace detail {

inline Rng sample_rng(const Campaign& c, std::uint64_t suite_tag, std::uint64_t scen,
                      std::uint64_t samp) {
  return Rng(mix_seed(mix_seed(c.seed, suite_tag, 0), scen, samp));
}

inline std::vector<double> draw_point(Rng& rng, std::size_t n,
                                      const std::pair<double, double>& box) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform(box.first, box.second);
  return x;
}

class Recorder {
 public:
  Recorder(std::vector<Record>& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

  void at(const std::string& scenario, std::size_t sample, const std::vector<double>& x) {
    scenario_ = scenario;
    sample_ = sample;
    x_ = x;
  }

  void check(const std::string& name, double raw, double normalized, double tol) {
    Record r;
    fill(r, name);
    r.raw = raw;
    r.normalized = normalized;
    r.tolerance = tol;
    r.status = std::abs(normalized) <= tol ? "pass" : "fail";
    out_.push_back(std::move(r));
  }

  void skip(const std::string& name, const std::string& tag) {
    Record r;
    fill(r, name);
    r.status = "skip";
    r.error = tag;
    out_.push_back(std::move(r));
  }

 private:
  void fill(Record& r, const std::string& name) {
    r.scenario = scenario_;
    r.sample = sample_;
    r.check = name;
    r.suite = suite_;
    r.x = x_;
  }
  std::vector<Record>& out_;
  std::string suite_;
  std::string scenario_;
  std::size_t sample_ = 0;
  std::vector<double> x_;
};

// Generic-point rejection: the closed-form derivatives divide by
// D = sum x_i F_i', so samples with |D| < 0.1 * max(1, |F|_max * |x|) are
// skipped (and recorded) rather than verified with amplified roundoff.
// |F|_max is recovered from the sample itself: |F_j| = |grad_j| * |D|.
inline bool near_caustic(const FieldSample& s) {
  double gmax = 0.0;
  for (double g : s.grad) gmax = std::max(gmax, std::abs(g));
  double fmax = gmax * std::abs(s.denom);
  return std::abs(s.denom) < 0.1 * std::max(1.0, fmax * norm2(s.x));
}

struct SkipTally {
  std::size_t attempted = 0;
  std::size_t skipped = 0;
};

inline void run_single_suite(const Campaign& c, std::vector<Record>& records,
                             std::map<std::string, SkipTally>& tally) {
  Recorder rec(records, "single");
  const double tol_con = c.tol("constraint", 1e-12);
  const double tol_w1 = c.tol("weight_one", 1e-12);
  const double tol_el = c.tol("el", 1e-8);
  for (std::size_t si = 0; si < c.scenarios.size(); ++si) {
    const Scenario& sc = c.scenarios[si];
    if (sc.multi) continue;
    auto& t = tally["single:" + sc.id];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 1, si, k);
      std::vector<double> x = draw_point(rng, sc.family.n, c.box);
      rec.at(sc.id, k, x);
      ++t.attempted;
      FieldSample s;
      try {
        s = sample_field(sc.family, x);
        if (near_caustic(s)) {
          rec.skip("sample", "RejectedDenominator");
          ++t.skipped;
          continue;
        }
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
        continue;
      }
      double cres = constraint_at(sc.family, x, s.phi).value;
      rec.check("constraint", cres, cres / std::max(1.0, std::abs(sc.family.c)), tol_con);
      for (const auto& L : c.lagrangians) {
        if (L.n != sc.family.n) continue;
        try {
          Jet2 jet = lagrangian_jet(L, s.grad, s.phi);
          double w = -jet.value();
          for (std::size_t a = 0; a < L.n; ++a) w += s.grad[a] * jet.grad(a);
          rec.check("weight_one:" + L.label, w, w / (std::abs(jet.value()) + 1e-30), tol_w1);
          Residual r = el_residual(L, s);
          rec.check("el:" + L.label, r.raw, r.normalized, tol_el);
        } catch (const Error& e) {
          rec.skip("el:" + L.label, e.tag());
        }
      }
    }
  }
}

inline void run_homogeneity_suite(const Campaign& c, std::vector<Record>& records,
                                  std::map<std::string, SkipTally>& tally) {
  Recorder rec(records, "homogeneity");
  const double tol_w1 = c.tol("weight_one", 1e-12);
  const double tol_nv = c.tol("hessian_nullvector", 1e-10);
  const double tol_or = c.tol("orthogonality", 1e-10);
  const double tol_do = c.tol("differentiated_orthogonality", 1e-9);
  for (std::size_t li = 0; li < c.lagrangians.size(); ++li) {
    const LagrangianSpec& L = c.lagrangians[li];
    auto& t = tally["homogeneity:L/" + L.label];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 2, li, k);
      std::vector<double> g = draw_point(rng, L.n, c.box);
      double phi = rng.uniform(c.box.first, c.box.second);
      rec.at("L/" + L.label, k, g);
      ++t.attempted;
      try {
        Jet2 jet = lagrangian_jet(L, g, phi);
        double w = -jet.value();
        for (std::size_t a = 0; a < L.n; ++a) w += g[a] * jet.grad(a);
        rec.check("weight_one", w, w / (std::abs(jet.value()) + 1e-30), tol_w1);
        Mat M(L.n, L.n);
        for (std::size_t a = 0; a < L.n; ++a)
          for (std::size_t b = 0; b < L.n; ++b) M(a, b) = jet.hess(a, b);
        double nv = norm2(M.apply(g));
        rec.check("hessian_nullvector", nv, nv / (frobenius(M) * norm2(g) + 1e-30), tol_nv);
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
      }
    }
  }
  for (std::size_t mi = 0; mi < c.mlagrangians.size(); ++mi) {
    const MultiLagrangianSpec& L = c.mlagrangians[mi];
    auto& t = tally["homogeneity:ML/" + L.label];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 2, 1000 + mi, k);
      Mat grad(L.m, L.n);
      std::vector<double> flat;
      for (std::size_t a = 0; a < L.m; ++a)
        for (std::size_t j = 0; j < L.n; ++j) {
          grad(a, j) = rng.uniform(c.box.first, c.box.second);
          flat.push_back(grad(a, j));
        }
      rec.at("ML/" + L.label, k, flat);
      ++t.attempted;
      try {
        Jet2 jet = multi_lagrangian_jet(L, grad);
        Mat defect = orthogonality_defect(L, grad);
        double worst = 0.0;
        for (std::size_t a = 0; a < L.m; ++a)
          for (std::size_t b = 0; b < L.m; ++b) worst = std::max(worst, std::abs(defect(a, b)));
        rec.check("orthogonality", worst, worst / (std::abs(jet.value()) + 1e-30), tol_or);
        Residual d = differentiated_orthogonality_defect(L, grad);
        rec.check("differentiated_orthogonality", d.raw, d.normalized, tol_do);
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
      }
    }
  }
}

inline void run_multi_suite(const Campaign& c, std::vector<Record>& records,
                            std::map<std::string, SkipTally>& tally) {
  Recorder rec(records, "multi");
  const double tol_con = c.tol("constraint", 1e-12);
  const double tol_or = c.tol("orthogonality", 1e-10);
  const double tol_el = c.tol("multifield_el", 1e-7);
  const double tol_st = c.tol("structure", 1e-7);
  for (std::size_t si = 0; si < c.scenarios.size(); ++si) {
    const Scenario& sc = c.scenarios[si];
    if (!sc.multi) continue;
    auto& t = tally["multi:" + sc.id];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 3, si, k);
      std::vector<double> x = draw_point(rng, sc.mfamily.n, c.box);
      rec.at(sc.id, k, x);
      ++t.attempted;
      MultiFieldSample s;
      try {
        s = sample_multifield(sc.mfamily, x);
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
        continue;
      }
      double worst_con = 0.0, worst_raw = 0.0;
      auto jets = component_jets(sc.mfamily, s.phi);
      for (std::size_t a = 0; a < sc.mfamily.m; ++a) {
        double acc = -sc.mfamily.c[a];
        for (std::size_t i = 0; i < sc.mfamily.n; ++i) acc += x[i] * jets[a][i].value();
        double nrm = acc / std::max(1.0, std::abs(sc.mfamily.c[a]));
        if (std::abs(nrm) > std::abs(worst_con)) { worst_con = nrm; worst_raw = acc; }
      }
      rec.check("constraint", worst_raw, worst_con, tol_con);
      for (const auto& L : c.mlagrangians) {
        if (L.m != sc.mfamily.m || L.n != sc.mfamily.n) continue;
        try {
          Jet2 jet = multi_lagrangian_jet(L, s.grad);
          Mat defect = orthogonality_defect(L, s.grad);
          double worst = 0.0;
          for (std::size_t a = 0; a < L.m; ++a)
            for (std::size_t b = 0; b < L.m; ++b)
              worst = std::max(worst, std::abs(defect(a, b)));
          rec.check("orthogonality:" + L.label, worst,
                    worst / (std::abs(jet.value()) + 1e-30), tol_or);
          std::vector<Residual> el = multifield_el_residual(L, s);
          Residual top{0.0, 0.0};
          for (const auto& r : el)
            if (std::abs(r.normalized) > std::abs(top.normalized)) top = r;
          rec.check("multifield_el:" + L.label, top.raw, top.normalized, tol_el);
        } catch (const Error& e) {
          rec.skip("multifield_el:" + L.label, e.tag());
        }
      }
      try {
        double sd = structure_defect(s);
        rec.check("structure", sd, sd, tol_st);
      } catch (const Error& e) {
        rec.skip("structure", e.tag());
      }
    }
  }
}

inline void run_hierarchy_suite(const Campaign& c, std::vector<Record>& records,
                                std::map<std::string, SkipTally>& tally) {
  Recorder rec(records, "hierarchy");
  const double tol_h = c.tol("hierarchy", 1e-7);
  const double tol_u = c.tol("universal_field", 1e-7);
  for (std::size_t si = 0; si < c.scenarios.size(); ++si) {
    const Scenario& sc = c.scenarios[si];
    if (sc.multi || sc.family.n > 3) continue;
    const std::size_t n = sc.family.n;
    std::vector<const LagrangianSpec*> pool;
    for (const auto& L : c.lagrangians)
      if (L.n == n) pool.push_back(&L);
    if (pool.empty()) continue;
    auto& t = tally["hierarchy:" + sc.id];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 4, si, k);
      std::vector<double> x = draw_point(rng, n, c.box);
      rec.at(sc.id, k, x);
      ++t.attempted;
      FieldSample s;
      try {
        s = sample_field(sc.family, x);
        if (near_caustic(s)) {
          rec.skip("sample", "RejectedDenominator");
          ++t.skipped;
          continue;
        }
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
        continue;
      }
      for (std::size_t r = 0; r < n; ++r) {
        for (const auto* L : pool) {
          std::string name = "order" + std::to_string(r) + ":" + L->label;
          try {
            HierarchyOrder order{r, std::vector<LagrangianSpec>(r + 1, *L)};
            Residual res = generic_residual(order, s);
            rec.check(name, res.raw, res.normalized, tol_h);
          } catch (const Error& e) {
            rec.skip(name, e.tag());
          }
        }
        if (pool.size() >= r + 1) {
          std::string name = "order" + std::to_string(r) + ":mixed";
          try {
            HierarchyOrder order;
            order.r = r;
            for (std::size_t a = 0; a <= r; ++a) order.lagrangians.push_back(*pool[a]);
            Residual res = generic_residual(order, s);
            rec.check(name, res.raw, res.normalized, tol_h);
          } catch (const Error& e) {
            rec.skip(name, e.tag());
          }
        }
      }
      try {
        Residual u = universal_field_residual(s);
        rec.check("universal_field", u.raw, u.normalized, tol_u);
      } catch (const Error& e) {
        rec.skip("universal_field", e.tag());
      }
    }
  }
}

inline void run_firstorder_suite(const Campaign& c, std::vector<Record>& records,
                                 std::map<std::string, SkipTally>& tally) {
  Recorder rec(records, "firstorder");
  const double tol_sym = c.tol("sym", 1e-8);
  const double tol_sim = c.tol("simple", 1e-8);
  const double tol_fc = c.tol("form_consistency", 1e-10);
  for (std::size_t si = 0; si < c.scenarios.size(); ++si) {
    const Scenario& sc = c.scenarios[si];
    if (sc.multi) continue;
    const std::size_t n = sc.family.n;
    if (n < 2) continue;
    auto& t = tally["firstorder:" + sc.id];
    for (std::size_t k = 0; k < c.samples; ++k) {
      Rng rng = sample_rng(c, 5, si, k);
      std::vector<double> x = draw_point(rng, n, c.box);
      rec.at(sc.id, k, x);
      ++t.attempted;
      FieldSample s;
      try {
        s = sample_field(sc.family, x);
        if (near_caustic(s)) {
          rec.skip("sample", "RejectedDenominator");
          ++t.skipped;
          continue;
        }
        ratios(s);  // raises VanishingDenominator before any pair check
      } catch (const Error& e) {
        rec.skip("sample", e.tag());
        ++t.skipped;
        continue;
      }
      auto nm = [](const char* base, std::size_t j, std::size_t k2) {
        return std::string(base) + ":" + std::to_string(j + 1) + "," + std::to_string(k2 + 1);
      };
      for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t k2 = j; k2 + 1 < n; ++k2) {
          Residual sd = sym_defect(s, j, k2);
          rec.check(nm("sym", j, k2), sd.raw, sd.normalized, tol_sym);
          double fc = form_consistency_defect(s, j, k2);
          rec.check(nm("form_consistency", j, k2), fc, fc, tol_fc);
        }
      for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t k2 = 0; k2 + 1 < n; ++k2) {
          Residual sd = simple_defect(s, j, k2);
          rec.check(nm("simple", j, k2), sd.raw, sd.normalized, tol_sim);
        }
    }
  }
}

}  // namespace detail

inline CampaignResult run_campaign(const Campaign& c) {
  c.validate();
  CampaignResult res;
  std::map<std::string, detail::SkipTally> tally;
  if (c.runs("single")) detail::run_single_suite(c, res.records, tally);
  if (c.runs("homogeneity")) detail::run_homogeneity_suite(c, res.records, tally);
  if (c.runs("multi")) detail::run_multi_suite(c, res.records, tally);
  if (c.runs("hierarchy")) detail::run_hierarchy_suite(c, res.records, tally);
  if (c.runs("firstorder")) detail::run_firstorder_suite(c, res.records, tally);

  std::sort(res.records.begin(), res.records.end(), [](const Record& a, const Record& b) {
    return std::tie(a.scenario, a.sample, a.check, a.suite) <
           std::tie(b.scenario, b.sample, b.check, b.suite);
  });
  for (const auto& r : res.records) {
    if (r.status == "pass") ++res.passed;
    else if (r.status == "fail") ++res.failed;
    else ++res.skipped;
    if (r.status != "skip") {
      auto [it, fresh] = res.max_normalized.try_emplace(r.check, std::abs(r.normalized));
      if (!fresh) it->second = std::max(it->second, std::abs(r.normalized));
    }
  }
  for (const auto& [id, t] : tally)
    if (t.attempted > 0 && 2 * t.skipped >= t.attempted) res.flagged.push_back(id);
  return res;
}

inline nlohmann::json report_json(const Campaign& c, const CampaignResult& res) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : res.records) {
    nlohmann::json j{{"scenario", r.scenario}, {"sample", r.sample},   {"check", r.check},
                     {"suite", r.suite},       {"x", r.x},             {"raw", r.raw},
                     {"normalized", r.normalized},                     {"tolerance", r.tolerance},
                     {"status", r.status},     {"error", r.error}};
    records.push_back(std::move(j));
  }
  nlohmann::json summary{
      {"suite", c.suite},
      {"seed", c.seed},
      {"samples", c.samples},
      {"counts",
       {{"checks", res.passed + res.failed},
        {"passed", res.passed},
        {"failed", res.failed},
        {"skipped", res.skipped}}},
      {"max_normalized", res.max_normalized},
      {"flagged_scenarios", res.flagged},
  };
  return nlohmann::json{{"records", std::move(records)}, {"summary", std::move(summary)}};
}

inline std::string render_table(const CampaignResult& res) {
  std::ostringstream os;
  os << "check                                            worst |normalized|   verdict\n";
  std::map<std::string, std::pair<double, bool>> by_check;
  for (const auto& r : res.records) {
    if (r.status == "skip") continue;
    auto& slot = by_check[r.suite + "/" + r.check];
    slot.first = std::max(slot.first, std::abs(r.normalized));
    slot.second = slot.second || r.status == "fail";
  }
  os.precision(3);
  os << std::scientific;
  for (const auto& [name, v] : by_check) {
    os << name;
    for (std::size_t p = name.size(); p < 49; ++p) os << ' ';
    os << v.first << "        " << (v.second ? "FAIL" : "ok") << "\n";
  }
  os << "totals: " << res.passed << " passed, " << res.failed << " failed, " << res.skipped
     << " skipped\n";
  for (const auto& f : res.flagged) os << "flagged (skip rate >= 50%): " << f << "\n";
  return os.str();
}

// ---- config (de)serialization ----

inline Campaign campaign_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  Campaign c;
  try {
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::size_t>();
    if (j.contains("box")) {
      auto b = j.at("box");
      if (!b.is_array() || b.size() != 2) throw ConfigError("box must be [lo, hi]");
      c.box = {b[0].get<double>(), b[1].get<double>()};
    }
    if (j.contains("tolerance"))
      for (const auto& [name, t] : j.at("tolerance").items())
        c.tolerance[name] = t.get<double>();
    if (j.contains("scenarios")) {
      for (const auto& sj : j.at("scenarios")) {
        Scenario sc;
        sc.id = sj.at("id").get<std::string>();
        std::string type = sj.value("type", "single");
        if (type == "single") {
          std::size_t n = sj.at("n").get<std::size_t>();
          std::vector<std::string> bodies = sj.at("F").get<std::vector<std::string>>();
          std::optional<std::pair<double, double>> bracket;
          if (sj.contains("bracket")) {
            auto b = sj.at("bracket");
            if (!b.is_array() || b.size() != 2)
              throw ConfigError("bracket must be [lo, hi]");
            bracket = {{b[0].get<double>(), b[1].get<double>()}};
          }
          std::optional<double> guess;
          if (sj.contains("guess")) guess = sj.at("guess").get<double>();
          sc.family = make_family(n, bodies, sj.at("c").get<double>(), bracket, guess, sc.id);
        } else if (type == "multi") {
          sc.multi = true;
          std::size_t m = sj.at("m").get<std::size_t>();
          std::size_t n = sj.at("n").get<std::size_t>();
          auto bodies = sj.at("F").get<std::vector<std::vector<std::string>>>();
          auto cs = sj.at("c").get<std::vector<double>>();
          std::vector<double> guess;
          if (sj.contains("guess")) guess = sj.at("guess").get<std::vector<double>>();
          sc.mfamily = make_multifamily(m, n, bodies, cs, guess, sc.id);
        } else {
          throw ConfigError("scenario type must be 'single' or 'multi'");
        }
        c.scenarios.push_back(std::move(sc));
      }
    }
    if (j.contains("lagrangians")) {
      for (const auto& lj : j.at("lagrangians")) {
        std::string label = lj.value("label", "");
        std::string builtin = lj.value("builtin", "");
        if (builtin == "companion") {
          std::size_t n = lj.at("n").get<std::size_t>();
          std::vector<int> metric;
          if (lj.contains("metric")) metric = lj.at("metric").get<std::vector<int>>();
          LagrangianSpec L = companion(n, metric);
          if (!label.empty()) L.label = label;
          c.lagrangians.push_back(std::move(L));
        } else if (builtin == "jacobian_companion") {
          MultiLagrangianSpec L = jacobian_companion(lj.at("m").get<std::size_t>(),
                                                     lj.at("n").get<std::size_t>());
          if (!label.empty()) L.label = label;
          c.mlagrangians.push_back(std::move(L));
        } else if (builtin.empty()) {
          c.lagrangians.push_back(make_lagrangian(
              lj.at("n").get<std::size_t>(), lj.at("body").get<std::string>(), label));
        } else {
          throw ConfigError("unknown builtin lagrangian '" + builtin + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

// Bundled defaults: three random-but-reproducible families per dimension
// (drawn from the campaign seed), the standard weight-one pool per
// dimension, and the fixed multifield scenarios with the Jacobian-minor
// density. Fills only the parts the config left empty.
inline void apply_default_pools(Campaign& c) {
  if (c.scenarios.empty()) {
    Rng rng(mix_seed(c.seed, 0xFA31, 0));
    for (std::size_t n : {2u, 3u, 4u}) {
      for (int i = 0; i < 3; ++i) {
        std::string id = "n" + std::to_string(n) + "/f" + std::to_string(i);
        Scenario sc;
        sc.family = builtins::random_family(n, rng, c.box, id);
        sc.id = id;
        c.scenarios.push_back(std::move(sc));
      }
    }
    for (auto& mf : builtins::default_multifamilies()) {
      Scenario sc;
      sc.multi = true;
      sc.id = mf.label;
      sc.mfamily = std::move(mf);
      c.scenarios.push_back(std::move(sc));
    }
  }
  if (c.lagrangians.empty() && c.mlagrangians.empty()) {
    for (std::size_t n : {2u, 3u, 4u})
      for (auto& L : builtins::pool_lagrangians(n)) c.lagrangians.push_back(std::move(L));
    c.mlagrangians.push_back(jacobian_companion(2, 3));
  }
}

inline Campaign default_campaign(std::uint64_t seed = 42) {
  Campaign c;
  c.seed = seed;
  apply_default_pools(c);
  return c;
}

}  // namespace varsol
