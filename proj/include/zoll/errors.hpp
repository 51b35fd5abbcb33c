#pragma once

#include <stdexcept>
#include <string>

namespace zoll {

// Failure taxonomy for the whole library.  Every throwing path uses one of
// these so callers (and the CLI exit-code mapping) can dispatch on kind.
enum class ErrorKind {
  invalid_input,        // malformed spec/file/argument
  degenerate_tangency,  // tangent lines requested at a conic point
  near_conic,           // form evaluation too close to the conic
  chart_overflow,       // sample too close to a chart pole
  no_convergence,       // Newton stalled
  holomorphy_loss,      // re-expansion discarded real negative-frequency energy
  continuation_stuck,   // homotopy step shrank below the floor
  docility_required,    // operation needs a certified docile surface
  quadrature_unresolved,// refinement disagreement above tolerance
  derivative_vanishes,  // boundary derivative below threshold
  phase_step_too_large, // winding increments stay >= pi after refinement
  seed_not_found,       // no grid disk boundary near the requested label
  trace_diverged,       // pseudo-arclength corrector failed
  not_closed,           // step budget exhausted before closure
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input: return "InvalidInput";
    case ErrorKind::degenerate_tangency: return "DegenerateTangency";
    case ErrorKind::near_conic: return "NearConic";
    case ErrorKind::chart_overflow: return "ChartOverflow";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::holomorphy_loss: return "HolomorphyLoss";
    case ErrorKind::continuation_stuck: return "ContinuationStuck";
    case ErrorKind::docility_required: return "DocilityRequired";
    case ErrorKind::quadrature_unresolved: return "QuadratureUnresolved";
    case ErrorKind::derivative_vanishes: return "DerivativeVanishes";
    case ErrorKind::phase_step_too_large: return "PhaseStepTooLarge";
    case ErrorKind::seed_not_found: return "SeedNotFound";
    case ErrorKind::trace_diverged: return "TraceDiverged";
    case ErrorKind::not_closed: return "NotClosed";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ZOLL_DEFINE_ERROR(Name, Kind)                      \
  struct Name : Error {                                    \
    explicit Name(const std::string& what)                 \
        : Error(ErrorKind::Kind, what) {}                  \
  }

ZOLL_DEFINE_ERROR(InvalidInput, invalid_input);
ZOLL_DEFINE_ERROR(DegenerateTangency, degenerate_tangency);
ZOLL_DEFINE_ERROR(NearConic, near_conic);
ZOLL_DEFINE_ERROR(ChartOverflow, chart_overflow);
ZOLL_DEFINE_ERROR(NoConvergence, no_convergence);
ZOLL_DEFINE_ERROR(HolomorphyLoss, holomorphy_loss);
ZOLL_DEFINE_ERROR(ContinuationStuck, continuation_stuck);
ZOLL_DEFINE_ERROR(DocilityRequired, docility_required);
ZOLL_DEFINE_ERROR(QuadratureUnresolved, quadrature_unresolved);
ZOLL_DEFINE_ERROR(DerivativeVanishes, derivative_vanishes);
ZOLL_DEFINE_ERROR(PhaseStepTooLarge, phase_step_too_large);
ZOLL_DEFINE_ERROR(SeedNotFound, seed_not_found);
ZOLL_DEFINE_ERROR(TraceDiverged, trace_diverged);
ZOLL_DEFINE_ERROR(NotClosed, not_closed);

#undef ZOLL_DEFINE_ERROR

}  // namespace zoll
