#pragma once

#include <stdexcept>
#include <string>

namespace kerrkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
  using Error::Error;
};

// A point outside the validity domain of its chart, or outside the overlap
// needed by a transition.
struct DomainError : Error {
  using Error::Error;
};

// sin(theta) too small for a component carrying sin^-2.
struct AxisError : Error {
  using Error::Error;
};

// Delta = 0 in a chart that is singular there (Boyer-Lindquist, basic tetrad).
struct HorizonError : Error {
  using Error::Error;
};

struct ConditioningError : Error {
  using Error::Error;
};

struct RootBracketError : Error {
  using Error::Error;
};

// A potential is negative where motion was requested.
struct ForbiddenRegion : Error {
  using Error::Error;
};

struct NonNullVelocity : Error {
  using Error::Error;
};

struct IntegrationError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

// A sampled function that does not decay at the ends of its grid.
struct DecayError : Error {
  using Error::Error;
};

// Spectrum not resolved by the grid, or wrap-around detected by re-padding.
struct ResolutionError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

}  // namespace kerrkit
