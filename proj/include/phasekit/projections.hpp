#pragma once

#include <span>
#include <utility>
#include <vector>

#include "phasekit/field.hpp"
#include "phasekit/forward.hpp"

namespace phasekit {

// Measured magnitudes b on the stacked oversampled Fourier grid.
struct MagnitudeData {
  GridShape shape;
  int patterns = 1;
  std::vector<double> values;
};

// |y| entrywise.
MagnitudeData magnitudes(const FourierField& y);

// Throws InvalidDataError on negative or empty data.
void validate(const MagnitudeData& b);

// P1: orthogonal projection onto A[X], computed as apply(A, [adjoint(A, y)]_X).
FourierField project_range(const ForwardOperator& A, const FourierField& y);

// P2 on raw spans: out_j = b_j * y_j / |y_j|, with 0 wherever |y_j| = 0.
void project_magnitude(std::span<const double> b, std::span<const Complex> y,
                       std::span<Complex> out);

// P2: keep the phase of y, impose the measured magnitudes.
FourierField project_magnitude(const MagnitudeData& b, const FourierField& y);

// R = 2P - I for an arbitrary projection callable.
template <typename Projection>
FourierField reflect(Projection&& projection, const FourierField& y) {
  FourierField p = std::forward<Projection>(projection)(y);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = 2.0 * p.values[i] - y.values[i];
  }
  return p;
}

FourierField reflect_range(const ForwardOperator& A, const FourierField& y);
FourierField reflect_magnitude(const MagnitudeData& b, const FourierField& y);

}  // namespace phasekit
