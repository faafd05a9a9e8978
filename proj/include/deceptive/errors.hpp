#pragma once

#include <stdexcept>
#include <string>

namespace deceptive {

// Boosting an arm whose reference probability is zero.
class InfeasibleBoost : public std::domain_error {
 public:
  explicit InfeasibleBoost(const std::string& what) : std::domain_error(what) {}
};

// Instance violates a structural assumption (e.g. best public arm equals best
// private arm when building gap structures).
class UnsupportedInstance : public std::invalid_argument {
 public:
  explicit UnsupportedInstance(const std::string& what)
      : std::invalid_argument(what) {}
};

class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what)
      : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace deceptive
