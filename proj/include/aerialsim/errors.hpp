#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aerialsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (config document or OBJ).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A well-formed document whose values break an invariant; field() names the culprit.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("invalid '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DegenerateQuaternionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class SingularHeadingError : public Error {
 public:
  using Error::Error;
};

class MissingAnnotationError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerialsim
