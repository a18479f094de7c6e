#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phasekit/field.hpp"
#include "phasekit/forward.hpp"

namespace phasekit {

// Real stacking (Re z, Im z) of a complex spatial field: n real parts
// followed by n imaginary parts.
struct RealPairField {
  GridShape shape;
  std::vector<double> values;
};

RealPairField split_complex(const SpatialImage& z);
SpatialImage merge_complex(const RealPairField& w);
// Pair coordinates of -i * (complex field): (a, b) -> (b, -a).
RealPairField rotate_quarter(const RealPairField& w);

double norm(const RealPairField& w);
double dot(const RealPairField& a, const RealPairField& b);

// The forward operator with the solution's Fourier phases divided out:
// z -> conj(phase(A x0)) o (A z). Its real form (the m x 2n matrix acting on
// stacked (Re, Im) coordinates) drives the local-convergence analysis: the
// iteration contracts around x0 exactly when the second singular value of
// that matrix stays below one.
class Linearization {
 public:
  // Throws DegenerateSolutionError when |A x0| has (near-)zero entries.
  Linearization(const ForwardOperator& A, const SpatialImage& x0);

  FourierField apply(const SpatialImage& z) const;
  SpatialImage adjoint(const FourierField& w) const;

  // Real form on stacked coordinates and its transpose.
  std::vector<double> pair_apply(const RealPairField& w) const;
  RealPairField pair_adjoint(std::span<const double> u) const;

  // Normalized stacked coordinates of x0: the known leading right singular
  // direction (singular value 1).
  const RealPairField& leading_direction() const { return v1_; }

  std::size_t domain_dim() const { return v1_.values.size(); }  // 2n
  std::size_t range_dim() const { return phase_conj_.size(); }  // m

  const std::vector<double>& reference_magnitudes() const { return y0_mags_; }

 private:
  const ForwardOperator* A_;
  std::vector<Complex> phase_conj_;
  std::vector<double> y0_mags_;
  RealPairField v1_;
};

struct PowerIterationResult {
  double sigma2 = 0.0;
  int iterations = 0;
};

// Second singular value by power iteration on the real normal operator,
// deflating the known leading direction after every multiply. Stops when the
// relative eigenvalue change stays below 1e-10 for 10 consecutive steps;
// otherwise throws ToleranceNotReachedError carrying the best estimate.
PowerIterationResult sigma2_power(const ForwardOperator& A, const SpatialImage& x0,
                                  int max_iters = 5000, std::uint64_t seed = 1);

struct PairingCheck {
  std::vector<double> singular_values;  // all 2n, descending
  double pairing_residual = 0.0;        // max_k |s_k^2 + s_{2n+1-k}^2 - 1|
  double vector_residual = 0.0;         // right-vector pairing, non-degenerate pairs only
};

// Dense SVD of the materialized real form; grids up to 8x8 only.
PairingCheck pairing_check(const ForwardOperator& A, const SpatialImage& x0);

struct SpectralReport {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma_min = 0.0;
  double pairing_residual = 0.0;  // NaN in power mode
  bool gap_ok = false;            // sigma2 < 1 - kGapMargin
  double eta_hint = 0.0;          // sigma2, the certified local rate
  std::string mode;               // "dense" or "power"

  std::string to_key_values() const;
  static std::string csv_header();
  std::string csv_row() const;
};

inline constexpr double kGapMargin = 1e-6;

SpectralReport spectral_report_dense(const ForwardOperator& A, const SpatialImage& x0);
SpectralReport spectral_report_power(const ForwardOperator& A, const SpatialImage& x0,
                                     int max_iters = 5000, std::uint64_t seed = 1);

}  // namespace phasekit
