#pragma once

#include <stdexcept>
#include <string>

namespace vlens {

/// Input outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed beamline, lens, or scenario description.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure was asked for more accuracy than its settings allow.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean-square radius reached the Compton floor; single-particle moment
/// dynamics are no longer meaningful past this instant.
class OverFocusError : public std::runtime_error {
 public:
  OverFocusError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  /// Crossing instant, natural units, measured from the start of the call.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Non-finite state met while integrating an ODE.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NoFocusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoCaptureFieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vlens
