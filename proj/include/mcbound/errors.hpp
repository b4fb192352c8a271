#pragma once

#include <stdexcept>
#include <string>

namespace mcbound {

// Every error names the invariant it guards so CLI diagnostics can cite it.
class Error : public std::runtime_error {
 public:
  Error(std::string invariant, const std::string& what)
      : std::runtime_error(what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

// A drift/minorisation/rate certificate does not satisfy its hypotheses.
class CertificateError : public Error {
 public:
  using Error::Error;
};

// A user-supplied parameter lies outside its admissible range.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Quadrature, linear solve or root finding did not reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (v < 1 for H_phi, u
// outside (0,1] for a quantile, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A scan that is proven finite in theory hit its hard iteration cap.
class NonTerminationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcbound
