#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace phdae {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A pivot fell below the relative singularity threshold during elimination.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// Newton iteration exhausted its budget. Carries the last iterate.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Eigen::VectorXd last_iterate,
                double residual_norm, int iterations)
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm),
        iterations_(iterations) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual_norm() const { return residual_norm_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
  int iterations_;
};

/// The implicit solve of a time step failed (after the half-step retry).
class NewtonFailure : public NoConvergence {
 public:
  using NoConvergence::NoConvergence;
};

/// An explicit scheme was asked to step a system that is not an ODE.
class IndexTooHigh : public Error {
 public:
  using Error::Error;
};

class NothingToRegularize : public Error {
 public:
  using Error::Error;
};

/// A state left the domain on which the energy is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonPositiveEnergy : public Error {
 public:
  using Error::Error;
};

class ReferenceUnavailable : public Error {
 public:
  using Error::Error;
};

/// Raised by model constructors when structural validation fails.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace phdae
