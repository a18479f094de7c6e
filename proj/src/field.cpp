#include "phasekit/field.hpp"

#include <cmath>
#include <string>

namespace phasekit {

GridShape::GridShape(int rows, int cols) : n1(rows), n2(cols) {
  if (rows < 2 || cols < 2) {
    throw DimensionError("grid must be at least 2x2, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

SpatialImage SpatialImage::zeros(GridShape shape, ImageKind kind) {
  return SpatialImage{shape, kind, std::vector<Complex>(shape.spatial_size())};
}

SpatialImage SpatialImage::constant(GridShape shape, double value) {
  SpatialImage out = zeros(shape, ImageKind::Real);
  for (auto& v : out.values) v = Complex(value, 0.0);
  return out;
}

FourierField FourierField::zeros(GridShape shape, int patterns) {
  if (patterns < 1 || patterns > 2) {
    throw DimensionError("pattern count must be 1 or 2, got " + std::to_string(patterns));
  }
  return FourierField{shape, patterns,
                      std::vector<Complex>(shape.fourier_size() * patterns)};
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw DimensionError("inner product of vectors with lengths " +
                         std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
  return sum;
}

double norm(std::span<const Complex> a) {
  double sum = 0.0;
  for (const Complex& v : a) sum += std::norm(v);
  return std::sqrt(sum);
}

Complex inner(const SpatialImage& a, const SpatialImage& b) {
  if (!(a.shape == b.shape)) throw DimensionError("inner product of mismatched grids");
  return inner(std::span<const Complex>(a.values), std::span<const Complex>(b.values));
}

Complex inner(const FourierField& a, const FourierField& b) {
  if (!(a.shape == b.shape) || a.patterns != b.patterns) {
    throw DimensionError("inner product of mismatched Fourier fields");
  }
  return inner(std::span<const Complex>(a.values), std::span<const Complex>(b.values));
}

double norm(const SpatialImage& a) { return norm(std::span<const Complex>(a.values)); }
double norm(const FourierField& a) { return norm(std::span<const Complex>(a.values)); }

AlignmentResult align_phase(const SpatialImage& x, const SpatialImage& x0, AlignMode mode) {
  if (!(x.shape == x0.shape)) throw DimensionError("align_phase on mismatched grids");
  const Complex xx0 = inner(x, x0);
  Complex c;
  if (mode == AlignMode::Unit) {
    const double mag = std::abs(xx0);
    if (mag == 0.0) {
      throw DegenerateAlignmentError("<x, x0> vanishes; unit-phase alignment undefined");
    }
    c = std::conj(xx0) / mag;
  } else {
    double xx = 0.0;
    for (const Complex& v : x.values) xx += std::norm(v);
    c = (xx == 0.0) ? Complex(0.0) : std::conj(xx0) / xx;
  }
  double err2 = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    err2 += std::norm(c * x.values[i] - x0.values[i]);
  }
  return {c, std::sqrt(err2)};
}

double relative_error(const SpatialImage& x, const SpatialImage& x0) {
  const double ref = norm(x0);
  if (ref == 0.0) throw InvalidReferenceError("reference image has zero norm");
  return align_phase(x, x0, AlignMode::Free).aligned_error / ref;
}

}  // namespace phasekit
