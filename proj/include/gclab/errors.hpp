#pragma once

#include <stdexcept>
#include <string>

namespace gclab {

// Base for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation left the domain where it is defined (e.g. a point pushed onto the
// ideal boundary).
struct NumericDomainError : Error { using Error::Error; };

// An isometry had the wrong type for the requested operation.
struct ClassificationError : Error { using Error::Error; };

// Coincident endpoints or other measure-zero configurations that cannot be resolved.
struct DegenerateError : Error { using Error::Error; };

// A word reduced to the identity where a nontrivial class was required.
struct TrivialClassError : Error { using Error::Error; };

struct ReductionError : Error { using Error::Error; };
struct DecompositionError : Error { using Error::Error; };

// The universal intersection bound was violated; always a counting bug.
struct AuditError : Error { using Error::Error; };

struct IncompleteCensusError : Error { using Error::Error; };

// Census cache problems. Each failure mode has its own type so callers can tell
// them apart.
struct CacheVersionError : Error { using Error::Error; };
struct CacheChecksumError : Error { using Error::Error; };
struct CacheParseError : Error { using Error::Error; };

}  // namespace gclab
