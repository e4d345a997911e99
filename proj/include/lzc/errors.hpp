#pragma once

#include <stdexcept>
#include <string>

namespace lzc {

/// Input outside the mathematical domain of an operation (poles, degenerate
/// slopes, violated preconditions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its target (series budget,
/// quadrature tolerance, step-count exhaustion, norm drift).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace lzc
