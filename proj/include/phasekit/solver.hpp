#pragma once

#include <optional>
#include <vector>

#include "phasekit/field.hpp"
#include "phasekit/forward.hpp"
#include "phasekit/projections.hpp"

namespace phasekit {

// One Fourier-domain relaxed-reflection step:
//   y' = beta * (y + P1(2 P2 y - y)) - (2 beta - 1) * P2 y
// which interpolates error reduction (beta = 0.5) and the Douglas-Rachford /
// hybrid input-output iteration (beta = 1).
FourierField raar_step(const ForwardOperator& A, const MagnitudeData& b,
                       const FourierField& y, double beta);

// The two endpoint algorithms, pinned to their beta values.
FourierField er_step(const ForwardOperator& A, const MagnitudeData& b, const FourierField& y);
FourierField hio_step(const ForwardOperator& A, const MagnitudeData& b, const FourierField& y);

struct SolverConfig {
  double beta = 0.8;
  int max_iter = 150;
  // Stop once the tracked metric drops to tol: relative error when a
  // reference is given, magnitude residual otherwise. Non-finite tol
  // disables early stopping.
  double tol = 0.0;
  // Starting Fourier iterate. Defaults to propagating the all-ones image.
  std::optional<FourierField> init;
  // Ground truth for relative-error tracking (free-scalar alignment).
  std::optional<SpatialImage> reference;
};

enum class StopReason { MaxIter, RelErrTol, ResidualTol };

struct TraceRecord {
  int iter = 0;
  double rel_err = 0.0;  // NaN when no reference is tracked
  double residual = 0.0;  // || |y_k| - b || / ||b||
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  SpatialImage reconstruction;  // [A* y_K]_X
  StopReason reason = StopReason::MaxIter;
};

// Iterate raar_step from the configured start, recording one row per iterate
// y_1 ... y_K (K <= max_iter).
SolverTrace run(const ForwardOperator& A, const MagnitudeData& b, const SolverConfig& config);

}  // namespace phasekit
