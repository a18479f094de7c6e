#pragma once

#include <cstdint>
#include <vector>

#include "phasekit/field.hpp"

// Opaque FFTW plan handle; fftw3.h stays out of the public headers.
struct fftw_plan_s;

namespace phasekit {

// Quadratic phase-shift coefficients, one per recorded diffraction pattern.
// Units: radians per squared pixel index.
struct MaskSpec {
  std::vector<double> shifts;
};

// Object-domain constraint: the real line (one-pattern case) or the full
// complex plane (two-pattern case).
enum class ConstraintKind { RealLine, FullComplex };

// mask[r, c] = exp(i * shift * (r^2 + c^2)) on zero-based integer indices.
std::vector<Complex> make_mask(GridShape shape, double shift);

// Isometric propagation operator: per pattern, multiply by the quadratic
// phase mask, zero-pad into the top-left corner of the oversampled grid,
// apply the unitary 2-D DFT, and stack. Normalized so that adjoint(apply(x))
// returns x exactly.
class ForwardOperator {
 public:
  ForwardOperator(GridShape shape, MaskSpec mask, ConstraintKind constraint);
  ~ForwardOperator();

  ForwardOperator(const ForwardOperator&) = delete;
  ForwardOperator& operator=(const ForwardOperator&) = delete;
  ForwardOperator(ForwardOperator&& other) noexcept;
  ForwardOperator& operator=(ForwardOperator&& other) noexcept;

  const GridShape& shape() const { return shape_; }
  int patterns() const { return static_cast<int>(masks_.size()); }
  ConstraintKind constraint() const { return constraint_; }
  const MaskSpec& mask() const { return mask_; }

  FourierField apply(const SpatialImage& x) const;
  SpatialImage adjoint(const FourierField& y) const;

  // [z]_X: real part under RealLine, identity under FullComplex.
  SpatialImage constrain(SpatialImage z) const;

 private:
  GridShape shape_;
  MaskSpec mask_;
  ConstraintKind constraint_;
  double scale_ = 1.0;
  std::vector<std::vector<Complex>> masks_;
  fftw_plan_s* fwd_plan_ = nullptr;
  fftw_plan_s* bwd_plan_ = nullptr;
};

// Max over seeded random probes of ||A*(A x) - x|| / ||x||.
double isometry_check(const ForwardOperator& A, int trials, std::uint64_t seed);

}  // namespace phasekit
