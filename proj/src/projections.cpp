#include "phasekit/projections.hpp"

#include <cmath>

namespace phasekit {

MagnitudeData magnitudes(const FourierField& y) {
  MagnitudeData b{y.shape, y.patterns, {}};
  b.values.reserve(y.values.size());
  for (const Complex& v : y.values) b.values.push_back(std::abs(v));
  return b;
}

void validate(const MagnitudeData& b) {
  const std::size_t expected = b.shape.fourier_size() * static_cast<std::size_t>(b.patterns);
  if (b.values.size() != expected) {
    throw DimensionError("magnitude data length does not match its geometry");
  }
  for (double v : b.values) {
    if (!(v >= 0.0)) throw InvalidDataError("magnitude data must be nonnegative");
  }
}

FourierField project_range(const ForwardOperator& A, const FourierField& y) {
  return A.apply(A.constrain(A.adjoint(y)));
}

void project_magnitude(std::span<const double> b, std::span<const Complex> y,
                       std::span<Complex> out) {
  if (b.size() != y.size() || out.size() != y.size()) {
    throw DimensionError("project_magnitude on mismatched lengths");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double mag = std::abs(y[i]);
    out[i] = (mag == 0.0) ? Complex(0.0) : Complex(b[i] / mag) * y[i];
  }
}

FourierField project_magnitude(const MagnitudeData& b, const FourierField& y) {
  if (!(b.shape == y.shape) || b.patterns != y.patterns) {
    throw DimensionError("project_magnitude: data geometry does not match field");
  }
  FourierField out = FourierField::zeros(y.shape, y.patterns);
  project_magnitude(std::span<const double>(b.values), std::span<const Complex>(y.values),
                    std::span<Complex>(out.values));
  return out;
}

FourierField reflect_range(const ForwardOperator& A, const FourierField& y) {
  return reflect([&](const FourierField& v) { return project_range(A, v); }, y);
}

FourierField reflect_magnitude(const MagnitudeData& b, const FourierField& y) {
  return reflect([&](const FourierField& v) { return project_magnitude(b, v); }, y);
}

}  // namespace phasekit
