#pragma once

#include <stdexcept>
#include <string>

namespace sslab {

// Base class for every error raised by the library. `kind()` is a stable
// machine-readable tag; `what()` carries the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SSLAB_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

SSLAB_DEFINE_ERROR(NonPositiveParameter);
SSLAB_DEFINE_ERROR(GridTooCoarse);
SSLAB_DEFINE_ERROR(AssemblyError);
SSLAB_DEFINE_ERROR(DimensionMismatch);
SSLAB_DEFINE_ERROR(SingularMatrix);
SSLAB_DEFINE_ERROR(SingularStep);
SSLAB_DEFINE_ERROR(NoConvergence);
SSLAB_DEFINE_ERROR(NearSingularShift);
SSLAB_DEFINE_ERROR(DegenerateData);
SSLAB_DEFINE_ERROR(WindowTooSmall);
SSLAB_DEFINE_ERROR(EnergyUnderflow);
SSLAB_DEFINE_ERROR(BadRecipe);
SSLAB_DEFINE_ERROR(DegenerateDiscriminant);
SSLAB_DEFINE_ERROR(PreconditionViolation);
SSLAB_DEFINE_ERROR(NearSingularModeSystem);
SSLAB_DEFINE_ERROR(QuadratureFailure);
SSLAB_DEFINE_ERROR(UnderResolved);
SSLAB_DEFINE_ERROR(ConfigError);

#undef SSLAB_DEFINE_ERROR

}  // namespace sslab
