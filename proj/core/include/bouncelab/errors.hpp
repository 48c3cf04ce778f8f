#pragma once

#include <stdexcept>
#include <string>

namespace bouncelab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula (n < -3/4, m = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GridTooSmall : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Norm leak or probability reaching the box edge during propagation.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

class NearResonance : public Error {
 public:
  NearResonance(const std::string& what, int order) : Error(what), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

class NearIntegerOrder : public Error {
 public:
  using Error::Error;
};

class NoRevivalFound : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace bouncelab
