#pragma once

#include <stdexcept>
#include <string>

namespace rpd {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Vector/operator size mismatch; message names expected and actual sizes.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& where, std::size_t expected,
                 std::size_t actual)
      : Error(where + ": expected size " + std::to_string(expected) +
              ", got " + std::to_string(actual)) {}
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Requested (function, set, distance) triple has no closed-form prox.
class NoClosedFormError : public Error {
 public:
  explicit NoClosedFormError(const std::string& what) : Error(what) {}
};

// Maximizer or supremum does not exist on an unbounded set.
class UnboundedError : public Error {
 public:
  explicit UnboundedError(const std::string& what) : Error(what) {}
};

// Iterative estimate failed to converge; carries the last estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : Error(what), last_estimate(last_estimate) {}
  double last_estimate;
};

// Schedule regime incompatible with the instance or operation.
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error(what) {}
};

// Invalid experiment configuration or instance description.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace rpd
