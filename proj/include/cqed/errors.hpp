#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user configuration (CLI exit code 1).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// One "much greater than" / "similar to" condition and the ratio achieved.
struct Margin {
  std::string label;
  double ratio = 0.0;
  double required = 0.0;
  bool passed = false;
};

std::string format_margins(const std::vector<Margin>& margins);

/// A builder's physical preconditions failed (CLI exit code 2).
class RegimeValidityError : public Error {
 public:
  RegimeValidityError(const std::string& what, std::vector<Margin> margins)
      : Error(what + "\n" + format_margins(margins)), margins_(std::move(margins)) {}
  const std::vector<Margin>& margins() const { return margins_; }

 private:
  std::vector<Margin> margins_;
};

class UnclassifiableRegime : public RegimeValidityError {
 public:
  using RegimeValidityError::RegimeValidityError;
};

class SingularCoupling : public Error {
 public:
  using Error::Error;
};

class AmbiguousResonance : public Error {
 public:
  using Error::Error;
};

/// Accuracy or physicality bounds violated during propagation (CLI exit code 3).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace cqed
