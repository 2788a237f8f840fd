#pragma once

#include <stdexcept>
#include <string>

namespace ispec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// map_core
struct RootNotBracketed : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct RadiusExceeded : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };

// moduli
struct DomainExceeded : Error { using Error::Error; };
struct CertificateFailed : Error { using Error::Error; };

// transfer / spectral
struct NoConvergence : Error { using Error::Error; };
struct NonpositiveEigenfunction : Error { using Error::Error; };
struct SeminormBlowup : Error { using Error::Error; };

// stats
struct DegenerateVariance : Error { using Error::Error; };
struct InsufficientSignal : Error { using Error::Error; };

// cli / pipeline
struct ConfigError : Error { using Error::Error; };
struct MissingArtifact : Error { using Error::Error; };

}  // namespace ispec
