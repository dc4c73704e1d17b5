#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "varsol/varsol.hpp"

namespace support {

// A synthetic field sample with random gradient and random symmetric
// Hessian; exercises identities that hold for any (g, H), not just ones
// realized by an implicit field.
inline varsol::FieldSample random_sample(std::size_t n, varsol::Rng& rng) {
  varsol::FieldSample s;
  s.x.resize(n);
  s.grad.resize(n);
  s.hess = varsol::Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    s.x[j] = rng.uniform(0.5, 1.5);
    s.grad[j] = rng.uniform(0.3, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      double v = rng.uniform(-1.5, 1.5);
      s.hess(j, k) = v;
      s.hess(k, j) = v;
    }
  s.phi = rng.uniform(0.5, 1.5);
  s.denom = 1.0;
  return s;
}

struct CliResult {
  int code = -1;
  std::string out;
};

// Run the installed CLI binary with the given argument string, capturing
// exit code and combined stdout/stderr. Requires VARSOL_BIN and VARSOL_TMP
// in the environment (set by the ctest harness).
inline CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("VARSOL_BIN");
  const char* tmp = std::getenv("VARSOL_TMP");
  if (!bin || !tmp) return {-2, "VARSOL_BIN / VARSOL_TMP not set"};
  static int counter = 0;
  std::string outfile = std::string(tmp) + "/cli_out_" + std::to_string(counter++) + ".txt";
  std::string cmd = std::string("\"") + bin + "\" " + args + " > \"" + outfile + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = rc == -1 ? -1 : WEXITSTATUS(rc);
  std::ifstream in(outfile);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

inline std::string tmp_path(const std::string& name) {
  const char* tmp = std::getenv("VARSOL_TMP");
  return std::string(tmp ? tmp : ".") + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Least-squares slope of log(err) against log(h); the observed convergence
// order of a finite-difference scheme.
inline double loglog_slope(const std::vector<double>& hs, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double lx = std::log(hs[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace support
