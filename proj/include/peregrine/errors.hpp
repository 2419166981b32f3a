#pragma once

#include <stdexcept>
#include <string>

namespace peregrine {

// Input fails the truncation edge-decay requirement, or no valid
// periodic/decaying split exists for it.
struct DecayViolation : std::runtime_error {
  explicit DecayViolation(const std::string& what) : std::runtime_error(what) {}
};

// Curve is self-intersecting (chord-arc lower bound collapsed).
struct ChordArcViolation : std::runtime_error {
  explicit ChordArcViolation(const std::string& what) : std::runtime_error(what) {}
};

// A fixed-point or Neumann iteration stalled above tolerance.
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Time stepper left the trust region (instability or focusing blowup).
struct StepBlowup : std::runtime_error {
  explicit StepBlowup(const std::string& what) : std::runtime_error(what) {}
};

// An NLS state with the wrong governing equation was supplied.
struct NormalizationMismatch : std::runtime_error {
  explicit NormalizationMismatch(const std::string& what) : std::runtime_error(what) {}
};

// A pointwise division fell below its safety floor.
struct DivisionGuard : std::runtime_error {
  explicit DivisionGuard(const std::string& what) : std::runtime_error(what) {}
};

// Bad CLI flags or config keys.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace peregrine
