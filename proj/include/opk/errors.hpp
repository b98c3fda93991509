#pragma once

#include <stdexcept>
#include <string>

namespace opk {

// Two broad classes: bad input (validation) and numerics that broke down.
enum class ErrorClass { Validation, Numerical };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)), cls_(cls) {}
  const std::string& kind() const { return kind_; }
  ErrorClass error_class() const { return cls_; }

 private:
  std::string kind_;
  ErrorClass cls_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("shape", ErrorClass::Validation, m) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error("validation", ErrorClass::Validation, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", ErrorClass::Validation, m) {}
};
struct AdmissibilityError : Error {
  explicit AdmissibilityError(const std::string& m) : Error("admissibility", ErrorClass::Validation, m) {}
};
struct AlignmentError : Error {
  explicit AlignmentError(const std::string& m) : Error("alignment", ErrorClass::Validation, m) {}
};

struct ConditioningError : Error {
  ConditioningError(const std::string& m, double min_eig, double max_eig)
      : Error("conditioning", ErrorClass::Numerical, m), min_eig(min_eig), max_eig(max_eig) {}
  double min_eig;
  double max_eig;
};
struct KernelConsistencyError : Error {
  KernelConsistencyError(const std::string& m, double asym)
      : Error("kernel_consistency", ErrorClass::Numerical, m), asymmetry(asym) {}
  double asymmetry;
};
struct IndependenceError : Error {
  explicit IndependenceError(const std::string& m) : Error("independence", ErrorClass::Numerical, m) {}
};
struct DegenerateFrameError : Error {
  explicit DegenerateFrameError(const std::string& m) : Error("degenerate_frame", ErrorClass::Numerical, m) {}
};
struct RieszError : Error {
  explicit RieszError(const std::string& m) : Error("riesz_violation", ErrorClass::Numerical, m) {}
};

}  // namespace opk
