#pragma once

#include <stdexcept>
#include <string>

namespace smdim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied value violates a documented precondition. `field()` names
/// the offending parameter.
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// A computation reached a state with no meaningful answer (all-zero spectra,
/// insufficient exploration, ...).
class NumericalError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace smdim
