#ifndef CASIMIR_ERRORS_HPP
#define CASIMIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace casimir {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (k <= 0, T = 0 where T > 0 is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Undamped polarizability evaluated on (or too close to) a transition wavenumber.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// Invalid atom placement: overlapping atoms, atom on or behind the wall.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Numerical engine failed to reach its tolerance within the configured budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed atom block or run configuration. `where` names the key or line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// An oracle failed its validation gate and must not be trusted.
class OracleGateError : public Error {
 public:
  using Error::Error;
};

}  // namespace casimir

#endif  // CASIMIR_ERRORS_HPP
