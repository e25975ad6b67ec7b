#pragma once

#include <stdexcept>
#include <string>

namespace g2toda {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };
struct NonOrthogonalRhsError : Error { using Error::Error; };
struct SolvabilityError : Error { using Error::Error; };
struct NoConvergenceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace g2toda
