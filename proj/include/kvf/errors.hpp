#pragma once

#include <stdexcept>
#include <string>

namespace kvf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class InvalidLorentz : public Error {
public:
  using Error::Error;
};

class NotAntisymmetric : public Error {
public:
  using Error::Error;
};

/// An eigenvalue of #F was found off both the real and imaginary axes.
class SnapFailure : public Error {
public:
  SnapFailure(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  double distance() const { return distance_; }

private:
  double distance_;
};

class DegenerateSignature : public Error {
public:
  using Error::Error;
};

/// Raised when a rank or causal decision sits too close to a tolerance.
/// margin() is the smallest relative gap observed by the failing step.
class ClassificationUnstable : public Error {
public:
  ClassificationUnstable(const std::string& what, double margin)
      : Error(what + " (margin " + std::to_string(margin) + ")"), margin_(margin) {}
  double margin() const { return margin_; }

private:
  double margin_;
};

class DimensionTooSmall : public Error {
public:
  using Error::Error;
};

class ParamViolation : public Error {
public:
  using Error::Error;
};

class NotCanonical : public Error {
public:
  using Error::Error;
};

class ZeroField : public Error {
public:
  using Error::Error;
};

class NotABracketPair : public Error {
public:
  NotABracketPair(const std::string& what, double commutator_residual,
                  double translation_residual)
      : Error(what), commutator_residual_(commutator_residual),
        translation_residual_(translation_residual) {}
  double commutator_residual() const { return commutator_residual_; }
  double translation_residual() const { return translation_residual_; }

private:
  double commutator_residual_;
  double translation_residual_;
};

class ImpossibleTranslation : public Error {
public:
  using Error::Error;
};

class NonSeparable : public Error {
public:
  using Error::Error;
};

class ConstraintViolated : public Error {
public:
  using Error::Error;
};

class DegenerateSheet : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent input document.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace kvf
