#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

// Inconsistent or out-of-range configuration (dimension mismatch, wrong
// metric for a space, N over a solver cap, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Violation {
  std::optional<long> row;  // nullopt for set-level violations
  std::string message;
};

std::string describe(const std::vector<Violation>& violations);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Raised when a numeric procedure produces non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wg
