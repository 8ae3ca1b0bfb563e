#pragma once

#include <stdexcept>
#include <string>

namespace landbubble {

// Error categories double as CLI exit codes.
enum class ErrorCategory : int {
  config = 2,
  no_convergence = 3,
  domain = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error(ErrorCategory::no_convergence, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

#define LANDBUBBLE_DOMAIN_ERROR(NAME)                                   \
  class NAME : public DomainError {                                     \
   public:                                                              \
    explicit NAME(const std::string& what) : DomainError(what) {}       \
  }

LANDBUBBLE_DOMAIN_ERROR(InvalidBracket);
LANDBUBBLE_DOMAIN_ERROR(UnsupportedOrder);
LANDBUBBLE_DOMAIN_ERROR(TooFewSamples);
LANDBUBBLE_DOMAIN_ERROR(DegenerateSample);
LANDBUBBLE_DOMAIN_ERROR(DegenerateDistribution);
LANDBUBBLE_DOMAIN_ERROR(AssumptionViolation);
LANDBUBBLE_DOMAIN_ERROR(NoSteadyState);
LANDBUBBLE_DOMAIN_ERROR(AtThreshold);
LANDBUBBLE_DOMAIN_ERROR(NoRoot);
LANDBUBBLE_DOMAIN_ERROR(SeriesTooShort);
LANDBUBBLE_DOMAIN_ERROR(TailNotSummable);
LANDBUBBLE_DOMAIN_ERROR(ParameterError);

#undef LANDBUBBLE_DOMAIN_ERROR

}  // namespace landbubble
