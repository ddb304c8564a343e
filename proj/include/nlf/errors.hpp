#pragma once

#include <stdexcept>
#include <string>

namespace nlf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Operands built on different grids or bases.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EmptyBasisError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class OutOfSpanError : public Error {
 public:
  OutOfSpanError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NonOrthonormalPairError : public Error {
 public:
  NonOrthonormalPairError(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

class SpanError : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, double growth)
      : Error(what), growth_(growth) {}
  double growth() const { return growth_; }

 private:
  double growth_;
};

}  // namespace nlf
