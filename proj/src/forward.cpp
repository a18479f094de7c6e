#include "phasekit/forward.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <utility>

namespace phasekit {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<Complex> make_mask(GridShape shape, double shift) {
  if (!std::isfinite(shift)) throw ConfigError("phase shift must be finite");
  std::vector<Complex> mask(shape.spatial_size());
  for (int r = 0; r < shape.n1; ++r) {
    for (int c = 0; c < shape.n2; ++c) {
      const double quad = static_cast<double>(r) * r + static_cast<double>(c) * c;
      mask[static_cast<std::size_t>(r) * shape.n2 + c] = std::polar(1.0, shift * quad);
    }
  }
  return mask;
}

ForwardOperator::ForwardOperator(GridShape shape, MaskSpec mask, ConstraintKind constraint)
    : shape_(shape), mask_(std::move(mask)), constraint_(constraint) {
  const auto& shifts = mask_.shifts;
  if (shifts.empty() || shifts.size() > 2) {
    throw ConfigError("mask needs one or two phase shifts, got " +
                      std::to_string(shifts.size()));
  }
  if (shifts.size() == 2 && shifts[0] == shifts[1]) {
    throw ConfigError("two-pattern mask needs distinct phase shifts");
  }
  masks_.reserve(shifts.size());
  for (double d : shifts) masks_.push_back(make_mask(shape_, d));
  scale_ = 1.0 / std::sqrt(static_cast<double>(shape_.fourier_size()) *
                           static_cast<double>(shifts.size()));

  std::vector<Complex> in(shape_.fourier_size()), out(shape_.fourier_size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_plan_ = fftw_plan_dft_2d(shape_.m1(), shape_.m2(), as_fftw(in.data()),
                               as_fftw(out.data()), FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_plan_ = fftw_plan_dft_2d(shape_.m1(), shape_.m2(), as_fftw(in.data()),
                               as_fftw(out.data()), FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
}

ForwardOperator::~ForwardOperator() {
  if (fwd_plan_ != nullptr || bwd_plan_ != nullptr) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_plan_ != nullptr) fftw_destroy_plan(fwd_plan_);
    if (bwd_plan_ != nullptr) fftw_destroy_plan(bwd_plan_);
  }
}

ForwardOperator::ForwardOperator(ForwardOperator&& other) noexcept
    : shape_(other.shape_),
      mask_(std::move(other.mask_)),
      constraint_(other.constraint_),
      scale_(other.scale_),
      masks_(std::move(other.masks_)),
      fwd_plan_(std::exchange(other.fwd_plan_, nullptr)),
      bwd_plan_(std::exchange(other.bwd_plan_, nullptr)) {}

ForwardOperator& ForwardOperator::operator=(ForwardOperator&& other) noexcept {
  if (this != &other) {
    if (fwd_plan_ != nullptr || bwd_plan_ != nullptr) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      if (fwd_plan_ != nullptr) fftw_destroy_plan(fwd_plan_);
      if (bwd_plan_ != nullptr) fftw_destroy_plan(bwd_plan_);
    }
    shape_ = other.shape_;
    mask_ = std::move(other.mask_);
    constraint_ = other.constraint_;
    scale_ = other.scale_;
    masks_ = std::move(other.masks_);
    fwd_plan_ = std::exchange(other.fwd_plan_, nullptr);
    bwd_plan_ = std::exchange(other.bwd_plan_, nullptr);
  }
  return *this;
}

FourierField ForwardOperator::apply(const SpatialImage& x) const {
  if (!(x.shape == shape_)) throw DimensionError("apply: image shape does not match operator");
  FourierField out = FourierField::zeros(shape_, patterns());
  std::vector<Complex> padded(shape_.fourier_size());
  const int m2 = shape_.m2();
  for (int j = 0; j < patterns(); ++j) {
    std::fill(padded.begin(), padded.end(), Complex(0.0));
    const auto& mask = masks_[static_cast<std::size_t>(j)];
    for (int r = 0; r < shape_.n1; ++r) {
      for (int c = 0; c < shape_.n2; ++c) {
        const std::size_t src = static_cast<std::size_t>(r) * shape_.n2 + c;
        padded[static_cast<std::size_t>(r) * m2 + c] = x.values[src] * mask[src];
      }
    }
    auto block = out.block(j);
    fftw_execute_dft(fwd_plan_, as_fftw(padded.data()), as_fftw(block.data()));
    for (auto& v : block) v *= scale_;
  }
  return out;
}

SpatialImage ForwardOperator::adjoint(const FourierField& y) const {
  if (!(y.shape == shape_) || y.patterns != patterns()) {
    throw DimensionError("adjoint: field geometry does not match operator");
  }
  SpatialImage out = SpatialImage::zeros(shape_, ImageKind::Complex);
  std::vector<Complex> in(shape_.fourier_size()), back(shape_.fourier_size());
  const int m2 = shape_.m2();
  for (int j = 0; j < patterns(); ++j) {
    auto block = y.block(j);
    std::copy(block.begin(), block.end(), in.begin());
    fftw_execute_dft(bwd_plan_, as_fftw(in.data()), as_fftw(back.data()));
    const auto& mask = masks_[static_cast<std::size_t>(j)];
    for (int r = 0; r < shape_.n1; ++r) {
      for (int c = 0; c < shape_.n2; ++c) {
        const std::size_t dst = static_cast<std::size_t>(r) * shape_.n2 + c;
        out.values[dst] +=
            scale_ * back[static_cast<std::size_t>(r) * m2 + c] * std::conj(mask[dst]);
      }
    }
  }
  return out;
}

SpatialImage ForwardOperator::constrain(SpatialImage z) const {
  if (constraint_ == ConstraintKind::RealLine) {
    for (auto& v : z.values) v = Complex(v.real(), 0.0);
    z.kind = ImageKind::Real;
  }
  return z;
}

double isometry_check(const ForwardOperator& A, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("isometry_check needs at least one trial");
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    SpatialImage x = SpatialImage::zeros(A.shape(), ImageKind::Complex);
    for (auto& v : x.values) v = Complex(gauss(eng), gauss(eng));
    const double xnorm = norm(x);
    SpatialImage z = A.adjoint(A.apply(x));
    double diff2 = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      diff2 += std::norm(z.values[i] - x.values[i]);
    }
    worst = std::max(worst, std::sqrt(diff2) / xnorm);
  }
  return worst;
}

}  // namespace phasekit
