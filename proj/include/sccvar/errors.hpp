#pragma once

#include <stdexcept>
#include <string>

namespace sccvar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ProbabilityError : public Error {
 public:
  using Error::Error;
};

class RiskLevelError : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ScalingOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotCovering : public Error {
 public:
  using Error::Error;
};

/// A conic solve ended without a usable answer (numerical trouble, iteration cap).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// The problem handed to an algorithm has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Closed-form scaling requested where the strictly satisfied mass is too small.
class ConditionViolated : public Error {
 public:
  ConditionViolated(double tau, double epsilon)
      : Error("violated mass tau=" + std::to_string(tau) + " is not below epsilon=" +
              std::to_string(epsilon)),
        tau_(tau),
        epsilon_(epsilon) {}

  double tau() const { return tau_; }
  double epsilon() const { return epsilon_; }

 private:
  double tau_;
  double epsilon_;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class NoFeasibleIncumbent : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateBaseline : public Error {
 public:
  using Error::Error;
};

/// Malformed instance or solution document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sccvar
