#pragma once

// Independent reference implementations used to pin expected values in the
// test suites. Everything here works from the operator definitions directly
// (naive DFT sums, dense linear algebra, grid searches) and deliberately
// avoids the library's FFT-based code paths.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "phasekit/field.hpp"
#include "phasekit/forward.hpp"

namespace oracles {

using phasekit::Complex;
using phasekit::GridShape;
using phasekit::ImageKind;
using phasekit::SpatialImage;

// Dense stacked masked-DFT matrix, entry by entry from the definition:
//   A[(j,k1,k2),(r,c)] = exp(i d_j (r^2+c^2)) exp(-2 pi i (k1 r / m1 + k2 c / m2))
//                        / sqrt(p m1 m2)
inline Eigen::MatrixXcd dense_forward_matrix(GridShape g, const std::vector<double>& shifts) {
  const int p = static_cast<int>(shifts.size());
  const std::size_t n = g.spatial_size();
  const std::size_t m = g.fourier_size() * static_cast<std::size_t>(p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.fourier_size()) * p);
  Eigen::MatrixXcd mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (int j = 0; j < p; ++j) {
    for (int k1 = 0; k1 < g.m1(); ++k1) {
      for (int k2 = 0; k2 < g.m2(); ++k2) {
        const std::size_t row = static_cast<std::size_t>(j) * g.fourier_size() +
                                static_cast<std::size_t>(k1) * g.m2() + k2;
        for (int r = 0; r < g.n1; ++r) {
          for (int c = 0; c < g.n2; ++c) {
            const std::size_t col = static_cast<std::size_t>(r) * g.n2 + c;
            const double chirp = shifts[static_cast<std::size_t>(j)] *
                                 (static_cast<double>(r) * r + static_cast<double>(c) * c);
            const double twiddle =
                -2.0 * std::numbers::pi *
                (static_cast<double>(k1) * r / g.m1() + static_cast<double>(k2) * c / g.m2());
            mat(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                std::polar(scale, chirp + twiddle);
          }
        }
      }
    }
  }
  return mat;
}

inline Eigen::VectorXcd to_vector(const std::vector<Complex>& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Dense real form of the phase-fixed linearization at x0, built from the
// dense forward matrix: [Re(B) -Im(B)] with B = diag(conj(Ax0/|Ax0|)) A.
inline Eigen::MatrixXd dense_pair_matrix(GridShape g, const std::vector<double>& shifts,
                                         const SpatialImage& x0) {
  const Eigen::MatrixXcd a = dense_forward_matrix(g, shifts);
  const Eigen::VectorXcd y0 = a * to_vector(x0.values);
  Eigen::MatrixXcd b = a;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    b.row(i) *= std::conj(y0(i) / std::abs(y0(i)));
  }
  Eigen::MatrixXd pair(b.rows(), 2 * b.cols());
  pair.leftCols(b.cols()) = b.real();
  pair.rightCols(b.cols()) = -b.imag();
  return pair;
}

inline SpatialImage random_complex_image(GridShape g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpatialImage x = SpatialImage::zeros(g, ImageKind::Complex);
  for (auto& v : x.values) v = Complex(gauss(eng), gauss(eng));
  return x;
}

inline SpatialImage random_real_image(GridShape g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  SpatialImage x = SpatialImage::zeros(g, ImageKind::Real);
  for (auto& v : x.values) v = Complex(uni(eng), 0.0);
  return x;
}

// Random magnitudes bounded away from zero, times a uniform random phase.
inline SpatialImage random_complex_phantom(GridShape g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  SpatialImage x = SpatialImage::zeros(g, ImageKind::Complex);
  for (auto& v : x.values) v = std::polar(uni(eng), angle(eng));
  return x;
}

inline phasekit::FourierField random_field(GridShape g, int patterns, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto y = phasekit::FourierField::zeros(g, patterns);
  for (auto& v : y.values) v = Complex(gauss(eng), gauss(eng));
  return y;
}

// min over c of ||c x - x0|| by a zooming grid search over |c| and arg(c),
// independent of the closed-form optimum.
inline double scan_alignment_error(const SpatialImage& x, const SpatialImage& x0) {
  const double nx = phasekit::norm(x);
  const double nx0 = phasekit::norm(x0);
  auto residual = [&](Complex c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      sum += std::norm(c * x.values[i] - x0.values[i]);
    }
    return std::sqrt(sum);
  };
  double mag_center = nx0 / nx;
  double mag_halfwidth = mag_center;  // covers [0, 2 ||x0||/||x||]
  double phase_center = 0.0;
  double phase_halfwidth = std::numbers::pi;
  double best = residual(Complex(0.0));
  constexpr int kLevels = 6;
  constexpr int kGrid = 48;
  for (int level = 0; level < kLevels; ++level) {
    double best_mag = mag_center, best_phase = phase_center;
    for (int i = 0; i <= kGrid; ++i) {
      const double mag = mag_center + mag_halfwidth * (2.0 * i / kGrid - 1.0);
      if (mag < 0.0) continue;
      for (int j = 0; j <= kGrid; ++j) {
        const double phase = phase_center + phase_halfwidth * (2.0 * j / kGrid - 1.0);
        const double r = residual(std::polar(mag, phase));
        if (r < best) {
          best = r;
          best_mag = mag;
          best_phase = phase;
        }
      }
    }
    mag_center = best_mag;
    phase_center = best_phase;
    mag_halfwidth *= 3.0 / kGrid;
    phase_halfwidth *= 3.0 / kGrid;
  }
  return best;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace oracles
