#pragma once

#include <stdexcept>
#include <string>

namespace imgeo {

// Every failure raised by the library derives from imgeo::Error so callers
// (the CLI in particular) can catch one type and still report the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class OptionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

}  // namespace imgeo
