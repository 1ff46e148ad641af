#pragma once

#include <stdexcept>
#include <string>

namespace epiquad {

// Every failure mode the library reports. Callers that drive batches
// (the benchmark harness, the CLI) catch Error per item and keep going;
// nothing in the library writes NaN silently.
enum class ErrorCode {
  InvalidInput,        // malformed file, bad CLI argument, wrong matrix shape
  SingularF22,         // top-left 2x2 block of F not invertible; epipole at infinity
  CoincidentCenters,   // camera centers too close, F undefined
  DegenerateData,      // an epipolar half of the residual vanishes; nu* undefined
  VanishingLead,       // critical polynomial lost its leading coefficient
  ZeroGradient,        // Sampson step undefined at a singular point of the constraint
  NumericalBreakdown,  // iterative baseline hit a configuration it cannot handle
  PointAtInfinity,     // homogeneous triangulation returned w ~ 0
  ParallelRays,        // midpoint rays (nearly) parallel
  EmptyScene,          // synthetic generator produced no covisible points
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::SingularF22: return "SingularF22";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::VanishingLead: return "VanishingLead";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::ParallelRays: return "ParallelRays";
    case ErrorCode::EmptyScene: return "EmptyScene";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace epiquad
