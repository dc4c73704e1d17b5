#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "varsol/varsol.hpp"

namespace {

int cmd_verify(const std::string& suite, const std::optional<std::string>& config_path,
               const std::optional<std::uint64_t>& seed, const std::optional<double>& tol,
               const std::optional<std::size_t>& samples,
               const std::optional<std::string>& report_path) {
  varsol::Campaign c;
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) {
      std::cerr << "error: cannot open config '" << *config_path << "'\n";
      return 2;
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
      return 2;
    }
    c = varsol::campaign_from_json(j);
  }
  c.suite = suite;
  if (seed) c.seed = *seed;
  if (samples) c.samples = *samples;
  if (tol) c.tol_override = *tol;
  varsol::apply_default_pools(c);
  c.validate();

  auto t0 = std::chrono::steady_clock::now();
  varsol::CampaignResult res = varsol::run_campaign(c);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::cout << varsol::render_table(res);
  std::printf("wall time: %.3f s\n", secs);
  if (report_path) {
    std::ofstream out(*report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write report '" << *report_path << "'\n";
      return 2;
    }
    out << varsol::report_json(c, res).dump(2) << "\n";
    std::cout << "report written to " << *report_path << "\n";
  }
  return res.exit_code();
}

int cmd_check_homogeneity(const std::string& body, std::size_t n, std::uint64_t seed,
                          std::size_t samples) {
  varsol::LagrangianSpec L = varsol::make_lagrangian(n, body);
  varsol::Rng rng(varsol::mix_seed(seed, 0xC4EC, 0));
  double worst_w1 = 0.0, worst_nv = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<double> g(n);
    for (auto& v : g) v = rng.uniform(0.5, 1.5);
    double phi = rng.uniform(0.5, 1.5);
    varsol::Jet2 jet = varsol::lagrangian_jet(L, g, phi);
    double w = -jet.value();
    for (std::size_t a = 0; a < n; ++a) w += g[a] * jet.grad(a);
    worst_w1 = std::max(worst_w1, std::abs(w) / (std::abs(jet.value()) + 1e-30));
    varsol::Mat M(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) M(a, b) = jet.hess(a, b);
    double nv = varsol::norm2(M.apply(g));
    worst_nv = std::max(worst_nv, nv / (varsol::frobenius(M) * varsol::norm2(g) + 1e-30));
  }
  bool pass = worst_w1 <= 1e-12 && worst_nv <= 1e-10;
  std::printf("lagrangian: %s\n", varsol::to_string(L.body).c_str());
  std::printf("weight-one defect (worst, relative to |L|):   %.3e  (tol 1e-12)\n", worst_w1);
  std::printf("hessian nullvector defect (worst, relative):  %.3e  (tol 1e-10)\n", worst_nv);
  std::printf("verdict: %s\n", pass ? "weight one" : "NOT weight one");
  return pass ? 0 : 1;
}

int cmd_demo_bateman() {
  varsol::FamilySpec fam =
      varsol::make_family(2, {"phi", "phi^2"}, 1.0, {{0.05, 3.0}}, {}, "quad2");
  std::printf("field defined by x1*F1(phi) + x2*F2(phi) = c with F = (phi, phi^2), c = 1\n");
  std::printf("second-order form g2^2*h11 - 2*g1*g2*h12 + g1^2*h22 along it vs. a control:\n\n");
  std::printf("%-28s %-24s %-24s\n", "x", "implicit field", "control x1*x2");
  for (int i = 0; i < 5; ++i) {
    varsol::Rng rng(varsol::mix_seed(42, 7, static_cast<std::uint64_t>(i)));
    std::vector<double> x{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    varsol::FieldSample s = varsol::sample_field(fam, x);
    varsol::Residual u = varsol::universal_field_residual(s);
    varsol::FieldSample ctrl = varsol::builtins::field_from_expression("x1*x2", x);
    varsol::Residual uc = varsol::universal_field_residual(ctrl);
    std::printf("(%8.5f, %8.5f)       %-24.3e %-24.3e\n", x[0], x[1], u.normalized,
                uc.normalized);
  }
  std::printf("\nthe implicit field's residual vanishes to roundoff; the control's does not.\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"universal implicit solutions of weight-one variational problems"};
  app.require_subcommand(1);

  std::string suite;
  std::optional<std::string> config_path, report_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> samples;
  CLI::App* verify = app.add_subcommand("verify", "run a verification campaign");
  verify->add_option("suite", suite, "single|multi|hierarchy|firstorder|homogeneity|all")
      ->required();
  verify->add_option("--config", config_path, "campaign config (JSON)");
  verify->add_option("--seed", seed, "override the campaign seed");
  verify->add_option("--tol", tol, "override every check tolerance");
  verify->add_option("--samples", samples, "override samples per scenario");
  verify->add_option("--report", report_path, "write the JSON report here");

  std::string check_what, lag_body;
  std::size_t lag_n = 2;
  std::uint64_t check_seed = 42;
  std::size_t check_samples = 100;
  CLI::App* check = app.add_subcommand("check", "check a single property");
  check->add_option("what", check_what, "currently: homogeneity")->required();
  check->add_option("--lagrangian", lag_body, "density over g1..gn (and phi)");
  check->add_option("--n", lag_n, "gradient-slot count");
  check->add_option("--seed", check_seed, "sampling seed");
  check->add_option("--samples", check_samples, "number of probe points");

  std::string demo_what;
  CLI::App* demo = app.add_subcommand("demo", "small built-in demonstrations");
  demo->add_option("what", demo_what, "currently: bateman")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed())
      return cmd_verify(suite, config_path, seed, tol, samples, report_path);
    if (check->parsed()) {
      if (check_what != "homogeneity") {
        std::cerr << "error: unknown check '" << check_what << "'\n";
        return 2;
      }
      if (lag_body.empty()) {
        std::cerr << "error: check homogeneity needs --lagrangian\n";
        return 2;
      }
      return cmd_check_homogeneity(lag_body, lag_n, check_seed, check_samples);
    }
    if (demo->parsed()) {
      if (demo_what != "bateman") {
        std::cerr << "error: unknown demo '" << demo_what << "'\n";
        return 2;
      }
      return cmd_demo_bateman();
    }
  } catch (const varsol::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const varsol::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const varsol::Error& e) {
    std::cerr << "numerical breakdown [" << e.tag() << "]: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
