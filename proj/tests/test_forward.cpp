#include <doctest.h>

#include <cmath>
#include <complex>
#include <thread>
#include <vector>

#include "phasekit/forward.hpp"
#include "support/oracles.hpp"

using namespace phasekit;

TEST_CASE("make_mask evaluates the quadratic chirp literally") {
  const GridShape g(4, 4);
  const auto mask = make_mask(g, 3.0);
  CHECK(std::abs(mask[0] - Complex(1.0)) < 1e-15);                       // index (0,0)
  CHECK(std::abs(mask[5] - std::polar(1.0, 6.0)) < 1e-15);               // index (1,1)
  CHECK(std::abs(mask[2 * 4 + 3] - std::polar(1.0, 3.0 * 13.0)) < 1e-15);  // (2,3)

  const auto flat = make_mask(g, 0.0);
  for (const auto& v : flat) CHECK(std::abs(v - Complex(1.0)) < 1e-15);
}

TEST_CASE("mask spec validation") {
  const GridShape g(4, 4);
  CHECK_THROWS_AS(ForwardOperator(g, MaskSpec{{}}, ConstraintKind::RealLine), ConfigError);
  CHECK_THROWS_AS(ForwardOperator(g, MaskSpec{{1.0, 2.0, 3.0}}, ConstraintKind::FullComplex),
                  ConfigError);
  CHECK_THROWS_AS(ForwardOperator(g, MaskSpec{{3.0, 3.0}}, ConstraintKind::FullComplex),
                  ConfigError);
  CHECK_THROWS_AS(make_mask(g, std::nan("")), ConfigError);
}

TEST_CASE("apply of zero is zero, delta gives a flat modulus") {
  const GridShape g(4, 4);
  const ForwardOperator A(g, MaskSpec{{0.0}}, ConstraintKind::RealLine);

  const auto zero = SpatialImage::zeros(g, ImageKind::Real);
  CHECK(norm(A.apply(zero)) == 0.0);

  SpatialImage delta = SpatialImage::zeros(g, ImageKind::Real);
  delta.values[0] = 1.0;
  const FourierField y = A.apply(delta);
  const double expected = 1.0 / std::sqrt(static_cast<double>(g.fourier_size()));
  for (const auto& v : y.values) CHECK(std::abs(v) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("masked delta keeps a flat modulus regardless of the mask") {
  const GridShape g(4, 6);
  const ForwardOperator A(g, MaskSpec{{3.0, -3.0}}, ConstraintKind::FullComplex);
  SpatialImage delta = SpatialImage::zeros(g, ImageKind::Complex);
  delta.at(2, 3) = Complex(1.0);
  const FourierField y = A.apply(delta);
  const double expected = 1.0 / std::sqrt(2.0 * static_cast<double>(g.fourier_size()));
  for (const auto& v : y.values) CHECK(std::abs(v) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("matrix-free apply and adjoint match the dense definition") {
  for (const GridShape g : {GridShape(4, 4), GridShape(6, 6)}) {
    for (const std::vector<double>& shifts : {std::vector<double>{3.0},
                                             std::vector<double>{3.0, -3.0}}) {
      const auto constraint = shifts.size() == 1 ? ConstraintKind::RealLine
                                                 : ConstraintKind::FullComplex;
      const ForwardOperator A(g, MaskSpec{shifts}, constraint);
      const auto mat = oracles::dense_forward_matrix(g, shifts);

      const auto x = oracles::random_complex_image(g, 7);
      const Eigen::VectorXcd ax = mat * oracles::to_vector(x.values);
      const FourierField y = A.apply(x);
      for (Eigen::Index i = 0; i < ax.size(); ++i) {
        CHECK(std::abs(ax(i) - y.values[static_cast<std::size_t>(i)]) < 1e-10);
      }

      const auto probe = oracles::random_field(g, static_cast<int>(shifts.size()), 8);
      const Eigen::VectorXcd aty = mat.adjoint() * oracles::to_vector(probe.values);
      const SpatialImage z = A.adjoint(probe);
      for (Eigen::Index i = 0; i < aty.size(); ++i) {
        CHECK(std::abs(aty(i) - z.values[static_cast<std::size_t>(i)]) < 1e-10);
      }

      // The dense matrix itself is isometric.
      const Eigen::MatrixXcd gram = mat.adjoint() * mat;
      CHECK((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
            1e-10);
    }
  }
}

TEST_CASE("round trip, adjoint pairing, and linearity") {
  const GridShape g(8, 8);
  const ForwardOperator A(g, MaskSpec{{3.0}}, ConstraintKind::RealLine);

  const auto x = oracles::random_complex_image(g, 17);
  const SpatialImage back = A.adjoint(A.apply(x));
  CHECK(oracles::max_abs_diff(back.values, x.values) < 1e-10);

  CHECK(norm(A.adjoint(FourierField::zeros(g, 1))) == 0.0);

  const auto y = oracles::random_field(g, 1, 18);
  const Complex lhs = inner(A.apply(x), y);
  const Complex rhs = inner(x, A.adjoint(y));
  CHECK(std::abs(lhs - rhs) < 1e-10 * norm(x) * norm(y));

  const auto z = oracles::random_complex_image(g, 19);
  const Complex alpha(0.3, -1.2), beta(-0.7, 0.25);
  SpatialImage combo = SpatialImage::zeros(g, ImageKind::Complex);
  for (std::size_t i = 0; i < combo.values.size(); ++i) {
    combo.values[i] = alpha * x.values[i] + beta * z.values[i];
  }
  const FourierField lhs_field = A.apply(combo);
  const FourierField ax = A.apply(x);
  const FourierField az = A.apply(z);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs_field.values.size(); ++i) {
    worst = std::max(worst,
                     std::abs(lhs_field.values[i] - (alpha * ax.values[i] + beta * az.values[i])));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("isometry_check bounds and scaling fixture") {
  const GridShape g(6, 6);
  const ForwardOperator one(g, MaskSpec{{3.0}}, ConstraintKind::RealLine);
  CHECK(isometry_check(one, 16, 123) < 1e-10);

  const ForwardOperator two(g, MaskSpec{{3.0, -3.0}}, ConstraintKind::FullComplex);
  CHECK(isometry_check(two, 16, 123) < 1e-10);

  // A deliberately mis-normalized operator: scaling apply and adjoint by s
  // makes A*A = s^2 I, so the deviation is |1 - s^2|.
  const double s = 1.1;
  std::mt19937_64 eng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 8; ++t) {
    SpatialImage x = SpatialImage::zeros(g, ImageKind::Complex);
    for (auto& v : x.values) v = Complex(gauss(eng), gauss(eng));
    FourierField y = one.apply(x);
    for (auto& v : y.values) v *= s;
    SpatialImage z = one.adjoint(y);
    for (auto& v : z.values) v *= s;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) diff2 += std::norm(z.values[i] - x.values[i]);
    worst = std::max(worst, std::sqrt(diff2) / norm(x));
  }
  CHECK(worst == doctest::Approx(std::abs(1.0 - s * s)).epsilon(1e-9));

  CHECK_THROWS_AS(isometry_check(one, 0, 1), ConfigError);
}

TEST_CASE("one operator instance serves concurrent callers") {
  const GridShape g(16, 16);
  const ForwardOperator A(g, MaskSpec{{3.0, -3.0}}, ConstraintKind::FullComplex);
  std::vector<SpatialImage> inputs;
  std::vector<FourierField> expected;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    inputs.push_back(oracles::random_complex_image(g, 700 + seed));
    expected.push_back(A.apply(inputs.back()));
  }
  std::vector<SpatialImage> round_trips(inputs.size(),
                                        SpatialImage::zeros(g, ImageKind::Complex));
  std::vector<FourierField> outputs(inputs.size(), FourierField::zeros(g, 2));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < inputs.size(); i += 4) {
        outputs[i] = A.apply(inputs[i]);
        round_trips[i] = A.adjoint(outputs[i]);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < expected[i].values.size(); ++k) {
      CHECK(outputs[i].values[k] == expected[i].values[k]);
    }
    CHECK(oracles::max_abs_diff(round_trips[i].values, inputs[i].values) < 1e-10);
  }
}

TEST_CASE("shape mismatches are rejected") {
  const ForwardOperator A(GridShape(4, 4), MaskSpec{{3.0}}, ConstraintKind::RealLine);
  CHECK_THROWS_AS(A.apply(SpatialImage::zeros(GridShape(4, 5), ImageKind::Real)),
                  DimensionError);
  CHECK_THROWS_AS(A.adjoint(FourierField::zeros(GridShape(4, 4), 2)), DimensionError);
  CHECK_THROWS_AS(A.adjoint(FourierField::zeros(GridShape(6, 4), 1)), DimensionError);
}
