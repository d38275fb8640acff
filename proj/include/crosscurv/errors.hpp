#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace crosscurv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad cost description, unknown kind, invalid parameters or config keys.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a pair outside the working domain N.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The cross Hessian c_{ij̄} is singular or too ill-conditioned (A2 fails).
class NondegeneracyFailure : public Error {
 public:
  NondegeneracyFailure(const std::string& what, double smallest_singular_value)
      : Error(what), smallest_singular_value_(smallest_singular_value) {}
  double smallest_singular_value() const { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

/// Newton inversion failure; carries the last iterate.
class NewtonFailure : public Error {
 public:
  NewtonFailure(const std::string& what, Eigen::VectorXd last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

class SingularJacobian : public NewtonFailure {
 public:
  using NewtonFailure::NewtonFailure;
};

class NoConvergence : public NewtonFailure {
 public:
  using NewtonFailure::NewtonFailure;
};

/// A c-segment or horizontal geodesic could not be continued; `parameter()`
/// is the t (or s) at which the Newton solve failed.
class SegmentFailure : public Error {
 public:
  SegmentFailure(const std::string& what, double parameter) : Error(what), parameter_(parameter) {}
  double parameter() const { return parameter_; }

 private:
  double parameter_;
};

/// A numerical self-consistency check failed, e.g. two stencil steps disagree.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace crosscurv
