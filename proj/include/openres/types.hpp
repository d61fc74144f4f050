#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace openres {

using Complex = std::complex<double>;

// Error taxonomy. The CLI maps kinds to exit codes: validation -> 2,
// below_threshold -> 3, numerical -> 4, io -> 5.
enum class ErrorKind { validation, below_threshold, numerical, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct NonPositiveFrequency : Error {
  explicit NonPositiveFrequency(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct TooFewModes : Error {
  explicit TooFewModes(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct NonPositiveStep : Error {
  explicit NonPositiveStep(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct NegativeIntensity : Error {
  explicit NegativeIntensity(const std::string& what) : Error(ErrorKind::validation, what) {}
};
struct ZeroIntensity : Error {
  explicit ZeroIntensity(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct BelowThreshold : Error {
  explicit BelowThreshold(const std::string& what) : Error(ErrorKind::below_threshold, what) {}
};

// Signals proximity to an exceptional point: the eigenvector matrix is too
// ill-conditioned for a trustworthy bi-orthogonal decomposition.  Carries the
// closest eigenvalue pair.
struct NearDefective : Error {
  NearDefective(const std::string& what, Complex a, Complex b, double condition)
      : Error(ErrorKind::numerical, what), eigenvalue_a(a), eigenvalue_b(b), condition(condition) {}
  Complex eigenvalue_a;
  Complex eigenvalue_b;
  double condition;
};
struct DegenerateVectors : Error {
  explicit DegenerateVectors(const std::string& what) : Error(ErrorKind::numerical, what) {}
};
struct UnstableDynamics : Error {
  explicit UnstableDynamics(const std::string& what) : Error(ErrorKind::numerical, what) {}
};
struct MarginallyStable : Error {
  explicit MarginallyStable(const std::string& what) : Error(ErrorKind::numerical, what) {}
};
struct NearDegenerateLasingMode : Error {
  explicit NearDegenerateLasingMode(const std::string& what) : Error(ErrorKind::numerical, what) {}
};
struct ZeroModeMissing : Error {
  explicit ZeroModeMissing(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::below_threshold: return "below_threshold";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace openres
