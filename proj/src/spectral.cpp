#include "phasekit/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "format.hpp"

namespace phasekit {

namespace {

constexpr double kDegenerateMagnitude = 1e-12;  // relative to max |A x0|
constexpr double kPowerRelChange = 1e-10;
constexpr int kPowerStableSteps = 10;

using detail::format_number;

}  // namespace

RealPairField split_complex(const SpatialImage& z) {
  const std::size_t n = z.values.size();
  RealPairField w{z.shape, std::vector<double>(2 * n)};
  for (std::size_t i = 0; i < n; ++i) {
    w.values[i] = z.values[i].real();
    w.values[n + i] = z.values[i].imag();
  }
  return w;
}

SpatialImage merge_complex(const RealPairField& w) {
  const std::size_t n = w.values.size() / 2;
  SpatialImage z = SpatialImage::zeros(w.shape, ImageKind::Complex);
  for (std::size_t i = 0; i < n; ++i) {
    z.values[i] = Complex(w.values[i], w.values[n + i]);
  }
  return z;
}

RealPairField rotate_quarter(const RealPairField& w) {
  const std::size_t n = w.values.size() / 2;
  RealPairField out{w.shape, std::vector<double>(2 * n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = w.values[n + i];
    out.values[n + i] = -w.values[i];
  }
  return out;
}

double norm(const RealPairField& w) {
  double sum = 0.0;
  for (double v : w.values) sum += v * v;
  return std::sqrt(sum);
}

double dot(const RealPairField& a, const RealPairField& b) {
  if (a.values.size() != b.values.size()) {
    throw DimensionError("dot product of mismatched pair fields");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += a.values[i] * b.values[i];
  return sum;
}

Linearization::Linearization(const ForwardOperator& A, const SpatialImage& x0) : A_(&A) {
  if (!(x0.shape == A.shape())) {
    throw DimensionError("linearization: solution shape does not match operator");
  }
  const FourierField y0 = A.apply(x0);
  double max_mag = 0.0;
  for (const Complex& v : y0.values) max_mag = std::max(max_mag, std::abs(v));
  if (max_mag == 0.0) throw DegenerateSolutionError("A x0 is identically zero");
  phase_conj_.resize(y0.values.size());
  y0_mags_.resize(y0.values.size());
  for (std::size_t i = 0; i < y0.values.size(); ++i) {
    const double mag = std::abs(y0.values[i]);
    if (mag <= kDegenerateMagnitude * max_mag) {
      throw DegenerateSolutionError(
          "|A x0| has (near-)zero entries; the phase-fixed linearization is undefined");
    }
    phase_conj_[i] = std::conj(y0.values[i] / mag);
    y0_mags_[i] = mag;
  }
  v1_ = split_complex(x0);
  const double v1n = norm(v1_);
  for (double& v : v1_.values) v /= v1n;
}

FourierField Linearization::apply(const SpatialImage& z) const {
  FourierField f = A_->apply(z);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= phase_conj_[i];
  return f;
}

SpatialImage Linearization::adjoint(const FourierField& w) const {
  FourierField rotated = w;
  for (std::size_t i = 0; i < rotated.values.size(); ++i) {
    rotated.values[i] *= std::conj(phase_conj_[i]);
  }
  return A_->adjoint(rotated);
}

std::vector<double> Linearization::pair_apply(const RealPairField& w) const {
  if (w.values.size() != domain_dim()) {
    throw DimensionError("pair_apply: field length does not match 2n");
  }
  const FourierField f = apply(merge_complex(w));
  std::vector<double> out(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) out[i] = f.values[i].real();
  return out;
}

RealPairField Linearization::pair_adjoint(std::span<const double> u) const {
  if (u.size() != range_dim()) {
    throw DimensionError("pair_adjoint: field length does not match m");
  }
  FourierField w = FourierField::zeros(A_->shape(), A_->patterns());
  for (std::size_t i = 0; i < u.size(); ++i) w.values[i] = Complex(u[i], 0.0);
  return split_complex(adjoint(w));
}

PowerIterationResult sigma2_power(const ForwardOperator& A, const SpatialImage& x0,
                                  int max_iters, std::uint64_t seed) {
  if (max_iters < 1) throw ConfigError("sigma2_power needs at least one iteration");
  const Linearization lin(A, x0);
  const RealPairField& v1 = lin.leading_direction();
  const std::size_t dim = lin.domain_dim();

  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealPairField w{x0.shape, std::vector<double>(dim)};
  for (double& v : w.values) v = gauss(eng);
  auto deflate = [&](RealPairField& f) {
    const double coeff = dot(f, v1);
    for (std::size_t i = 0; i < dim; ++i) f.values[i] -= coeff * v1.values[i];
  };
  deflate(w);
  double wn = norm(w);
  if (wn == 0.0) throw ConfigError("degenerate random start in power iteration");
  for (double& v : w.values) v /= wn;

  double lambda = 0.0;
  int stable = 0;
  for (int it = 1; it <= max_iters; ++it) {
    RealPairField mw = lin.pair_adjoint(lin.pair_apply(w));
    deflate(mw);
    const double next_lambda = dot(w, mw);  // Rayleigh quotient, w is unit
    const double mwn = norm(mw);
    if (mwn == 0.0) return {0.0, it};  // nothing left beyond the deflated direction
    for (std::size_t i = 0; i < dim; ++i) w.values[i] = mw.values[i] / mwn;
    deflate(w);
    wn = norm(w);
    for (double& v : w.values) v /= wn;

    const double change = std::abs(next_lambda - lambda) /
                          std::max(std::abs(next_lambda), 1e-300);
    lambda = next_lambda;
    stable = (change < kPowerRelChange) ? stable + 1 : 0;
    if (stable >= kPowerStableSteps) {
      return {std::sqrt(std::max(lambda, 0.0)), it};
    }
  }
  throw ToleranceNotReachedError(
      "power iteration did not settle within " + std::to_string(max_iters) + " steps",
      std::sqrt(std::max(lambda, 0.0)));
}

namespace {

Eigen::MatrixXd materialize_pair_matrix(const Linearization& lin) {
  const std::size_t dim = lin.domain_dim();
  const std::size_t m = lin.range_dim();
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dim));
  RealPairField e{lin.leading_direction().shape, std::vector<double>(dim, 0.0)};
  for (std::size_t j = 0; j < dim; ++j) {
    e.values[j] = 1.0;
    const std::vector<double> col = lin.pair_apply(e);
    for (std::size_t i = 0; i < m; ++i) mat(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j)) = col[i];
    e.values[j] = 0.0;
  }
  return mat;
}

}  // namespace

PairingCheck pairing_check(const ForwardOperator& A, const SpatialImage& x0) {
  if (A.shape().n1 > 8 || A.shape().n2 > 8) {
    throw CapacityError("dense spectral analysis is limited to grids of at most 8x8");
  }
  const Linearization lin(A, x0);
  const Eigen::MatrixXd mat = materialize_pair_matrix(lin);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const std::size_t dim = lin.domain_dim();

  PairingCheck out;
  out.singular_values.assign(s.data(), s.data() + s.size());
  out.pairing_residual = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double sk = out.singular_values[k];
    const double sp = out.singular_values[dim - 1 - k];
    out.pairing_residual = std::max(out.pairing_residual, std::abs(sk * sk + sp * sp - 1.0));
  }

  // Right-vector pairing of non-degenerate pairs: the partner of v_k is the
  // quarter rotation of v_k, up to sign.
  const double gap_tol = 1e-6;
  out.vector_residual = 0.0;
  auto isolated = [&](std::size_t k) {
    const double sk = out.singular_values[k];
    if (k > 0 && std::abs(out.singular_values[k - 1] - sk) < gap_tol) return false;
    if (k + 1 < dim && std::abs(out.singular_values[k + 1] - sk) < gap_tol) return false;
    return true;
  };
  for (std::size_t k = 0; k < dim; ++k) {
    const std::size_t p = dim - 1 - k;
    if (!isolated(k) || !isolated(p)) continue;
    RealPairField vk{x0.shape, std::vector<double>(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
      vk.values[i] = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    const RealPairField expected = rotate_quarter(vk);
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double vp = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p));
      plus += (vp - expected.values[i]) * (vp - expected.values[i]);
      minus += (vp + expected.values[i]) * (vp + expected.values[i]);
    }
    out.vector_residual =
        std::max(out.vector_residual, std::sqrt(std::min(plus, minus)));
  }
  return out;
}

std::string SpectralReport::to_key_values() const {
  std::string s;
  s += "mode=" + mode + "\n";
  s += "sigma1=" + format_number(sigma1) + "\n";
  s += "sigma2=" + format_number(sigma2) + "\n";
  s += "sigma_min=" + format_number(sigma_min) + "\n";
  s += "pairing_residual=" + format_number(pairing_residual) + "\n";
  s += std::string("gap_ok=") + (gap_ok ? "true" : "false") + "\n";
  s += "eta_hint=" + format_number(eta_hint) + "\n";
  return s;
}

std::string SpectralReport::csv_header() {
  return "mode,sigma1,sigma2,sigma_min,pairing_residual,gap_ok,eta_hint";
}

std::string SpectralReport::csv_row() const {
  return mode + "," + format_number(sigma1) + "," + format_number(sigma2) + "," + format_number(sigma_min) + "," +
         format_number(pairing_residual) + "," + (gap_ok ? "true" : "false") + "," + format_number(eta_hint);
}

SpectralReport spectral_report_dense(const ForwardOperator& A, const SpatialImage& x0) {
  const PairingCheck check = pairing_check(A, x0);
  const auto& s = check.singular_values;
  SpectralReport report;
  report.sigma1 = s.front();
  report.sigma2 = s.size() > 1 ? s[1] : 0.0;
  report.sigma_min = s.back();
  report.pairing_residual = check.pairing_residual;
  report.gap_ok = report.sigma2 < 1.0 - kGapMargin;
  report.eta_hint = report.sigma2;
  report.mode = "dense";
  return report;
}

SpectralReport spectral_report_power(const ForwardOperator& A, const SpatialImage& x0,
                                     int max_iters, std::uint64_t seed) {
  const Linearization lin(A, x0);
  SpectralReport report;
  std::vector<double> top = lin.pair_apply(lin.leading_direction());
  double top_norm = 0.0;
  for (double v : top) top_norm += v * v;
  report.sigma1 = std::sqrt(top_norm);
  std::vector<double> bottom = lin.pair_apply(rotate_quarter(lin.leading_direction()));
  double bottom_norm = 0.0;
  for (double v : bottom) bottom_norm += v * v;
  report.sigma_min = std::sqrt(bottom_norm);
  report.sigma2 = sigma2_power(A, x0, max_iters, seed).sigma2;
  report.pairing_residual = std::numeric_limits<double>::quiet_NaN();
  report.gap_ok = report.sigma2 < 1.0 - kGapMargin;
  report.eta_hint = report.sigma2;
  report.mode = "power";
  return report;
}

}  // namespace phasekit
