#pragma once

#include <stdexcept>
#include <string>

namespace pulseforge {

// Error taxonomy shared across the library. The CLI maps these onto exit
// codes, so new failure modes should reuse one of the categories below.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed domain input (bad enum value, invalid covariance, u outside [0,1]).
struct InvalidInputError : Error {
  using Error::Error;
};

// A pulse that cannot be preprocessed or normalized (all-zero, support too short).
struct DegeneratePulseError : Error {
  using Error::Error;
};

// Non-finite values encountered during an iterative numerical procedure.
struct DivergenceError : Error {
  using Error::Error;
};

// Tensor/array shape mismatch in the differentiable engine or models.
struct ShapeError : Error {
  using Error::Error;
};

// Filesystem failure: cannot open, read or write.
struct IoError : Error {
  using Error::Error;
};

// A file that opened fine but whose contents are corrupt or inconsistent
// with what the caller expects (bad magic, truncated blob, missing metadata).
struct ArtifactError : Error {
  using Error::Error;
};

namespace constants {
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

}  // namespace pulseforge
