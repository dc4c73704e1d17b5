#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <nlohmann/json.hpp>

#include "support.hpp"

using support::run_cli;

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("verify").code == 2);             // suite is required
  CHECK(run_cli("verify bogus").code == 2);       // unknown suite name
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("check frobnicate").code == 2);
  CHECK(run_cli("check homogeneity").code == 2);  // needs --lagrangian
  CHECK(run_cli("demo nothing").code == 2);
  CHECK(run_cli("verify single --config /no/such/file.json").code == 2);

  std::string bad = support::tmp_path("bad_config.json");
  support::write_file(bad, "{ this is not json");
  auto r = run_cli("verify single --config \"" + bad + "\"");
  CHECK(r.code == 2);
  CHECK(r.out.find("not valid JSON") != std::string::npos);
}

TEST_CASE("help is available") {
  auto r = run_cli("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("verify runs are deterministic for a fixed seed") {
  std::string r1 = support::tmp_path("report_a.json");
  std::string r2 = support::tmp_path("report_b.json");
  auto a = run_cli("verify single --samples 2 --seed 5 --report \"" + r1 + "\"");
  auto b = run_cli("verify single --samples 2 --seed 5 --report \"" + r2 + "\"");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out.find("totals:") != std::string::npos);
  CHECK(a.out.find("wall time:") != std::string::npos);
  CHECK(a.out.find("report written to") != std::string::npos);

  std::string c1 = support::read_file(r1);
  std::string c2 = support::read_file(r2);
  REQUIRE(c1.size() > 100);
  CHECK(c1 == c2);

  auto j = nlohmann::json::parse(c1);
  CHECK(j.at("summary").at("counts").at("failed").get<int>() == 0);
  CHECK(j.at("summary").at("seed").get<int>() == 5);
}

TEST_CASE("verify accepts a config file") {
  std::string cfg = support::tmp_path("small_config.json");
  support::write_file(cfg, R"({
    "samples": 3,
    "scenarios": [
      {"id": "lin", "n": 2, "F": ["phi", "1+phi"], "c": 3.0, "bracket": [0.05, 3.0]}
    ],
    "lagrangians": [{"builtin": "companion", "n": 2}]
  })");
  auto r = run_cli("verify single --config \"" + cfg + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("totals:") != std::string::npos);
}

TEST_CASE("homogeneity check separates the two verdicts") {
  auto good = run_cli("check homogeneity --lagrangian \"sqrt(g1^2+g2^2)\" --n 2");
  CHECK(good.code == 0);
  CHECK(good.out.find("verdict: weight one") != std::string::npos);

  auto bad = run_cli("check homogeneity --lagrangian \"g1^2+g2^2\" --n 2");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("verdict: NOT weight one") != std::string::npos);

  auto three = run_cli("check homogeneity --lagrangian \"sqrt(g3^2)*(2+sin(g1/g3))\" --n 3");
  CHECK(three.code == 0);
}

TEST_CASE("bateman demo contrasts field and control") {
  auto r = run_cli("demo bateman");
  CHECK(r.code == 0);
  CHECK(r.out.find("control") != std::string::npos);
  CHECK(r.out.find("vanishes to roundoff") != std::string::npos);
}
