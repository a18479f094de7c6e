#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "phasekit/errors.hpp"

namespace phasekit {

using Complex = std::complex<double>;

// Pixel grid of the unknown image together with the oversampled Fourier grid.
// The Fourier grid is twice as dense per axis, realized by zero-padding.
struct GridShape {
  int n1 = 2;  // rows
  int n2 = 2;  // columns

  GridShape() = default;
  GridShape(int rows, int cols);

  int m1() const { return 2 * n1; }
  int m2() const { return 2 * n2; }
  std::size_t spatial_size() const {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  }
  std::size_t fourier_size() const {
    return static_cast<std::size_t>(m1()) * static_cast<std::size_t>(m2());
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

enum class ImageKind { Real, Complex };

// Complex field on the n1 x n2 pixel grid, stored row-major (row index
// varies slowest). kind == Real promises exactly zero imaginary parts.
struct SpatialImage {
  GridShape shape;
  ImageKind kind = ImageKind::Complex;
  std::vector<Complex> values;

  static SpatialImage zeros(GridShape shape, ImageKind kind);
  static SpatialImage constant(GridShape shape, double value);

  Complex& at(int r, int c) { return values[static_cast<std::size_t>(r) * shape.n2 + c]; }
  const Complex& at(int r, int c) const {
    return values[static_cast<std::size_t>(r) * shape.n2 + c];
  }
};

// Complex field on the stacked oversampled Fourier grids: `patterns` blocks
// of m1 x m2 values, each row-major.
struct FourierField {
  GridShape shape;
  int patterns = 1;
  std::vector<Complex> values;

  static FourierField zeros(GridShape shape, int patterns);

  std::size_t size() const { return values.size(); }
  std::span<Complex> block(int pattern) {
    return {values.data() + static_cast<std::size_t>(pattern) * shape.fourier_size(),
            shape.fourier_size()};
  }
  std::span<const Complex> block(int pattern) const {
    return {values.data() + static_cast<std::size_t>(pattern) * shape.fourier_size(),
            shape.fourier_size()};
  }
};

enum class AlignMode { Unit, Free };

// Optimal scalar c and the residual ||c*x - x0|| it achieves.
struct AlignmentResult {
  Complex c;
  double aligned_error = 0.0;
};

Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> a);

Complex inner(const SpatialImage& a, const SpatialImage& b);
Complex inner(const FourierField& a, const FourierField& b);
double norm(const SpatialImage& a);
double norm(const FourierField& a);

// Best scalar aligning x onto x0. Unit mode restricts |c| = 1 (the
// solution-set distance); free mode is the least-squares scalar used by the
// relative-error metric.
AlignmentResult align_phase(const SpatialImage& x, const SpatialImage& x0, AlignMode mode);

// align_phase(x, x0, Free).aligned_error / ||x0||.
double relative_error(const SpatialImage& x, const SpatialImage& x0);

}  // namespace phasekit
