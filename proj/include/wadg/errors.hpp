#pragma once

#include <stdexcept>
#include <string>

namespace wadg {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failures caused by numerics (exit code 1 in the CLI).
class NumericalError : public Error {
public:
  using Error::Error;
};

class SingularNodalBasis : public NumericalError {
public:
  explicit SingularNodalBasis(double cond)
      : NumericalError("modal Vandermonde at nodes is numerically singular (cond = " +
                       std::to_string(cond) + ")"),
        condition_number(cond) {}
  double condition_number;
};

class NonPositiveJacobian : public NumericalError {
public:
  NonPositiveJacobian(int elem, int point, double value)
      : NumericalError("non-positive Jacobian " + std::to_string(value) + " in element " +
                       std::to_string(elem) + " at quadrature point " + std::to_string(point)),
        element(elem), quad_point(point), jacobian(value) {}
  int element;
  int quad_point;
  double jacobian;
};

class NotSPD : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BlowUp : public NumericalError {
public:
  BlowUp(double t, double ratio)
      : NumericalError("energy grew by a factor " + std::to_string(ratio) + " at t = " +
                       std::to_string(t)),
        time(t), growth(ratio) {}
  double time;
  double growth;
};

class EigenSolveFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SizeCapExceeded : public Error {
public:
  SizeCapExceeded(long n, long cap)
      : Error("operator size " + std::to_string(n) + " exceeds cap " + std::to_string(cap)),
        size(n), limit(cap) {}
  long size;
  long limit;
};

/// Bad configuration or input file (exit code 2 in the CLI).
class ConfigError : public Error {
public:
  using Error::Error;
};

class MeshError : public Error {
public:
  using Error::Error;
};

} // namespace wadg
