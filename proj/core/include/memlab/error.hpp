#pragma once

#include <stdexcept>
#include <string>

namespace memlab {

/// Input outside the mathematical domain of an operation (non-positive width,
/// negative rate, efficiency outside [0, 1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// SNR requested where the noise count or noise model is zero.
class UndefinedSnrError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Simulation grid does not resolve the fastest rate in the problem.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Histogram analysis could not locate a required feature.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration. `where` addresses the offending
/// key path or line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

namespace detail {
inline void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}
}  // namespace detail

}  // namespace memlab
