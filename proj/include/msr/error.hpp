#pragma once

#include <stdexcept>
#include <string>

namespace msr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// repo-io
struct NotARepository : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct CliInvocationFailure : Error { using Error::Error; };
struct ParseFailure : Error { using Error::Error; };
struct PathAbsentAtRevision : Error { using Error::Error; };

// windowing
struct EmptyHistory : Error { using Error::Error; };
struct NonMonotonicBoundaries : Error { using Error::Error; };

// filters
struct MalformedGlob : Error { using Error::Error; };

// entities
struct OutputParseFailure : Error { using Error::Error; };

// identities
struct UnmappedIdentity : Error { using Error::Error; };

// simdiff
struct EmptySeries : Error { using Error::Error; };
struct UnalignedIdentities : Error { using Error::Error; };
struct WindowPlanMismatch : Error { using Error::Error; };

// mockgen
struct GitInvocationFailure : Error { using Error::Error; };
struct SpecTooLarge : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

} // namespace msr
