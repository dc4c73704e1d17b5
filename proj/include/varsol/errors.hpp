#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varsol {

// All varsol failures derive from Error and carry a stable tag so callers
// (and campaign skip accounting) can dispatch without string-matching what().
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("ParseError", what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  EvalError(std::size_t offset, const std::string& what)
      : Error("EvalError", what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error("NoConvergence", what) {}
};

class Singular : public Error {
 public:
  explicit Singular(const std::string& what) : Error("Singular", what) {}
};

class SingularJacobian : public Error {
 public:
  explicit SingularJacobian(const std::string& what) : Error("SingularJacobian", what) {}
};

class VanishingDenominator : public Error {
 public:
  explicit VanishingDenominator(const std::string& what) : Error("VanishingDenominator", what) {}
};

class DegenerateFit : public Error {
 public:
  explicit DegenerateFit(const std::string& what) : Error("DegenerateFit", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

}  // namespace varsol
