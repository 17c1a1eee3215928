#pragma once

#include <stdexcept>
#include <string>

namespace orbitlab {

// Base for every error raised by the library. kind() is a stable short tag
// used in reports and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define ORBITLAB_ERROR(Name)                                          \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  };

ORBITLAB_ERROR(TubeExit)
ORBITLAB_ERROR(DegenerateNormal)
ORBITLAB_ERROR(NondegeneracyViolation)
ORBITLAB_ERROR(NotAGeodesic)
ORBITLAB_ERROR(MaxItersExceeded)
ORBITLAB_ERROR(ClassDrift)
ORBITLAB_ERROR(ResonantLambda)
ORBITLAB_ERROR(FixedPointDiverged)
ORBITLAB_ERROR(DegenerateGeodesic)
ORBITLAB_ERROR(NewtonDiverged)
ORBITLAB_ERROR(SingularJacobian)
ORBITLAB_ERROR(AdmissibilityFailed)
ORBITLAB_ERROR(ContractionFailed)
ORBITLAB_ERROR(InsufficientPoints)
ORBITLAB_ERROR(ConfigError)

#undef ORBITLAB_ERROR

}  // namespace orbitlab
