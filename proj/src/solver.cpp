#include "phasekit/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace phasekit {

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.5 && beta <= 1.0)) {
    throw ConfigError("beta must lie in [0.5, 1], got " + std::to_string(beta));
  }
}

double magnitude_residual(const FourierField& y, const MagnitudeData& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    const double d = std::abs(y.values[i]) - b.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

FourierField raar_step(const ForwardOperator& A, const MagnitudeData& b,
                       const FourierField& y, double beta) {
  check_beta(beta);
  if (!(y.shape == A.shape()) || y.patterns != A.patterns()) {
    throw DimensionError("raar_step: field geometry does not match operator");
  }
  FourierField p2 = project_magnitude(b, y);
  FourierField reflected = FourierField::zeros(y.shape, y.patterns);
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    reflected.values[i] = 2.0 * p2.values[i] - y.values[i];
  }
  const FourierField ranged = A.apply(A.constrain(A.adjoint(reflected)));
  const double g = 2.0 * beta - 1.0;
  FourierField out = FourierField::zeros(y.shape, y.patterns);
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    out.values[i] = beta * (y.values[i] + ranged.values[i]) - g * p2.values[i];
  }
  return out;
}

FourierField er_step(const ForwardOperator& A, const MagnitudeData& b, const FourierField& y) {
  return raar_step(A, b, y, 0.5);
}

FourierField hio_step(const ForwardOperator& A, const MagnitudeData& b, const FourierField& y) {
  return raar_step(A, b, y, 1.0);
}

SolverTrace run(const ForwardOperator& A, const MagnitudeData& b, const SolverConfig& config) {
  check_beta(config.beta);
  if (config.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  validate(b);
  double bnorm = 0.0;
  for (double v : b.values) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) throw InvalidDataError("all-zero magnitude data");
  if (config.reference && norm(*config.reference) == 0.0) {
    throw InvalidReferenceError("reference image has zero norm");
  }

  FourierField y = config.init ? *config.init
                               : A.apply(SpatialImage::constant(A.shape(), 1.0));
  if (!(y.shape == A.shape()) || y.patterns != A.patterns()) {
    throw DimensionError("solver start does not match operator geometry");
  }

  SolverTrace trace;
  trace.records.reserve(static_cast<std::size_t>(config.max_iter));
  trace.reason = StopReason::MaxIter;
  SpatialImage x = SpatialImage::zeros(A.shape(), ImageKind::Complex);
  for (int k = 1; k <= config.max_iter; ++k) {
    x = A.constrain(A.adjoint(y));
    const double rel = config.reference ? relative_error(x, *config.reference)
                                        : std::numeric_limits<double>::quiet_NaN();
    const double res = magnitude_residual(y, b) / bnorm;
    trace.records.push_back({k, rel, res});
    if (std::isfinite(config.tol)) {
      if (config.reference && rel <= config.tol) {
        trace.reason = StopReason::RelErrTol;
        break;
      }
      if (!config.reference && res <= config.tol) {
        trace.reason = StopReason::ResidualTol;
        break;
      }
    }
    if (k < config.max_iter) y = raar_step(A, b, y, config.beta);
  }
  trace.reconstruction = std::move(x);
  return trace;
}

}  // namespace phasekit
