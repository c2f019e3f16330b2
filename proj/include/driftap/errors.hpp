#pragma once

#include <stdexcept>
#include <string>

namespace driftap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
 public:
  using Error::Error;
};

class SizeMismatchError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDensityError : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class ZeroSpeedError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by a stepper when the updated state is unusable: a non-finite value
/// or a non-positive density. Carries the first offending cell.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string field, int i, int j, double value, bool positivity)
      : Error(describe(field, i, j, value, positivity)),
        field_(std::move(field)),
        i_(i),
        j_(j),
        value_(value),
        positivity_(positivity) {}

  const std::string& field() const { return field_; }
  int i() const { return i_; }
  int j() const { return j_; }
  double value() const { return value_; }
  /// True when the failure is a non-positive density, false for non-finite values.
  bool positivity_violation() const { return positivity_; }

 private:
  static std::string describe(const std::string& field, int i, int j, double value,
                              bool positivity) {
    return std::string(positivity ? "non-positive density" : "non-finite value") + " in field " +
           field + " at cell (" + std::to_string(i) + ", " + std::to_string(j) +
           "): " + std::to_string(value);
  }

  std::string field_;
  int i_;
  int j_;
  double value_;
  bool positivity_;
};

}  // namespace driftap
