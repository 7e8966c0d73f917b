#pragma once

#include <stdexcept>
#include <string>

namespace pbesov {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the mathematical domain of an operation
/// (e.g. zeta(θ) with θ <= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition does not hold.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// The derivative was requested at a transition point of the bump train.
class NotDifferentiable : public Error {
 public:
  NotDifferentiable(double point, const std::string& what)
      : Error(what), point_(point) {}
  double point() const noexcept { return point_; }

 private:
  double point_;
};

/// The point lies in the untabulated tail [a_{n_cap}, a_inf). Evaluators treat
/// it as zero; `bound()` is the sup of every discarded bump.
class TruncationSaturated : public Error {
 public:
  TruncationSaturated(double point, double bound, const std::string& what)
      : Error(what), point_(point), bound_(bound) {}
  double point() const noexcept { return point_; }
  double bound() const noexcept { return bound_; }

 private:
  double point_;
  double bound_;
};

/// Two quadrature resolutions disagree beyond the requested tolerance.
class GridTooCoarse : public Error {
 public:
  GridTooCoarse(double discrepancy, double tolerance, const std::string& what)
      : Error(what), discrepancy_(discrepancy), tolerance_(tolerance) {}
  double discrepancy() const noexcept { return discrepancy_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double discrepancy_;
  double tolerance_;
};

/// The exponent formula is evaluated outside the parameter region in which
/// the smoothness characterization is proven. The formula value is still
/// carried so callers can report it.
class OutOfValidity : public Error {
 public:
  OutOfValidity(double value, const std::string& what)
      : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis fails; `inequality()` names the violated relation.
class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(std::string inequality)
      : Error("hypothesis violated: " + inequality),
        inequality_(std::move(inequality)) {}
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

}  // namespace pbesov
