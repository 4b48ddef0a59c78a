#pragma once

#include <stdexcept>
#include <string>

namespace bandit {

// Invalid experiment configuration (bad spec file, bad option value).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Missing or malformed input data (dataset file problems).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure: non-finite loss, gradient or activation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bandit
