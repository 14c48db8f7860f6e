#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

// Every failure the library raises deliberately goes through one of these.
// Anything else escaping is a bug.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two elements / functions built over different group models were mixed.
struct ModelMismatchError : Error {
  using Error::Error;
};

// An enumeration was requested whose predicted size exceeds the configured cap.
struct CapExceededError : Error {
  using Error::Error;
};

// A boundary object is not resolved deeply enough for the requested exact
// computation, or a density table stops short of a needed cylinder.
struct ResolutionError : Error {
  using Error::Error;
};

// A series or construction parameter is outside its convergence range
// (e.g. Patterson exponent s <= alpha, Schwartz weight t <= t0).
struct DivergenceError : Error {
  using Error::Error;
};

// Input is structurally invalid for the operation (empty support, radius too
// small, non-positive tolerance, ...).
struct DegenerateInputError : Error {
  using Error::Error;
};

// An approach sequence or test input lies outside the supported family
// (e.g. a non-radial sequence handed to the Dirac-Weierstrass certifier).
struct UnsupportedApproachError : Error {
  using Error::Error;
};

// A requested envelope/estimate fit has no feasible solution.
struct EstimateInfeasibleError : Error {
  using Error::Error;
};

// A file being parsed does not match the expected format.
struct SerializationError : Error {
  using Error::Error;
};

}  // namespace hyplab
