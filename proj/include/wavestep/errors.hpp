#pragma once

#include <stdexcept>
#include <string>

namespace wavestep {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Step positions must be strictly increasing.
struct NonMonotonicSteps : Error {
    using Error::Error;
};

/// values must hold exactly one more entry than steps.
struct SizeMismatch : Error {
    using Error::Error;
};

/// A +infinity region value (hard wall) is allowed only in the rightmost region.
struct InfiniteInteriorRegion : Error {
    using Error::Error;
};

/// E coincides with a region value; the local momentum vanishes and the
/// splitting at the adjacent steps is singular.
struct EnergyAtStepEdge : Error {
    using Error::Error;
};

/// Both momenta at a step are negligible; the splitting ratio is undefined.
struct DegenerateMomenta : Error {
    using Error::Error;
};

/// A component was sampled at a point its leading edge has not reached.
struct AheadOfWavefront : Error {
    using Error::Error;
};

/// The matching system for the exact solution is singular.
struct SingularMatching : Error {
    using Error::Error;
};

/// Bad or inconsistent run parameters.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace wavestep
