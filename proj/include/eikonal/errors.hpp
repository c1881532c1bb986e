#pragma once

#include <stdexcept>
#include <string>

namespace eikonal {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define EIKONAL_ERROR(Name)                                         \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(what) {}         \
    const char* kind() const noexcept override { return #Name; }    \
  };

EIKONAL_ERROR(StencilError)
EIKONAL_ERROR(DimensionError)
EIKONAL_ERROR(ShapeError)
EIKONAL_ERROR(SingularPointError)
EIKONAL_ERROR(GeometryError)
EIKONAL_ERROR(IncompatibleDataError)
EIKONAL_ERROR(NoConvergenceError)
EIKONAL_ERROR(DeterminantError)
EIKONAL_ERROR(ParameterError)
EIKONAL_ERROR(ConfigError)

#undef EIKONAL_ERROR

}  // namespace eikonal
