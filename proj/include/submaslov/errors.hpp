#pragma once

#include <stdexcept>
#include <string>

namespace submaslov {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- symplectic layer ---
struct InvalidDimension : Error { using Error::Error; };
struct InvalidFrame : Error { using Error::Error; };
struct ChartDomainError : Error { using Error::Error; };       // L not transverse to L1
struct InvalidChart : Error { using Error::Error; };           // (L0,L1) not a decomposition
struct InvalidSymplectomorphism : Error { using Error::Error; };
struct SplitInapplicable : Error { using Error::Error; };

/// No auxiliary Lagrangian chart covers a maximally refined subinterval.
struct PartitionFailure : Error {
    PartitionFailure(double t0, double t1)
        : Error("maslov_index: no transverse chart on subinterval [" + std::to_string(t0) +
                ", " + std::to_string(t1) + "]"),
          t_lo(t0), t_hi(t1) {}
    double t_lo, t_hi;
};

// --- geometry layer ---
struct DegenerateMetric : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };        // grid too coarse
struct IntegrationFailure : Error { using Error::Error; };
struct StiffnessFailure : Error { using Error::Error; };

/// A trajectory left the coordinate patch before the requested end instant.
struct PatchExit : Error {
    explicit PatchExit(double t_exit)
        : Error("trajectory left the coordinate patch at t = " + std::to_string(t_exit)),
          t(t_exit) {}
    double t;
};

// --- submersion / variational layer ---
struct InvalidArgument : Error { using Error::Error; };
struct IncompatibleSeed : Error { using Error::Error; };
struct InvalidBoundaryData : Error { using Error::Error; };
struct InvalidField : Error { using Error::Error; };

// --- scenarios ---
struct InvalidStationaryData : Error { using Error::Error; };
struct InvalidKKData : Error { using Error::Error; };

// --- cli ---
struct ConfigError : Error {
    ConfigError(const std::string& msg, int line_no = 0)
        : Error(line_no > 0 ? "config line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
    int line;
};

} // namespace submaslov
