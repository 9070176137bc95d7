#pragma once

#include <stdexcept>
#include <string>

namespace mixstable {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

class EmptyBatchError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimated_error, int terms)
      : Error(what + " (estimated relative error " + std::to_string(estimated_error) +
              ", terms " + std::to_string(terms) + ")"),
        estimated_error_(estimated_error),
        terms_(terms) {}

  double estimated_error() const noexcept { return estimated_error_; }
  int terms() const noexcept { return terms_; }

 private:
  double estimated_error_;
  int terms_;
};

class UnknownIdentityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterDomainError(message);
}

}  // namespace detail
}  // namespace mixstable
