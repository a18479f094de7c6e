#include "phasekit/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace phasekit {

namespace {

constexpr double kInversionCutoff = 30.0;  // Gaussian approximation above this mean
constexpr double kMaxMean = 9e15;          // integer counts must stay exact in a double

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform_open01(std::mt19937_64& eng) {
  // (0, 1]: safe under log()
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

double sample_poisson(double mean, std::mt19937_64& eng) {
  if (mean <= 0.0) return 0.0;
  if (mean < kInversionCutoff) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0, 1)
    double p = std::exp(-mean);
    double cdf = p;
    double k = 0.0;
    while (u > cdf && k < 512.0) {
      k += 1.0;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }
  const double u1 = uniform_open01(eng);
  const double u2 = uniform_open01(eng);
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  return std::max(0.0, std::round(mean + std::sqrt(mean) * z));
}

}  // namespace

MagnitudeData poissonize(const MagnitudeData& b, const NoiseSpec& spec) {
  if (!std::isfinite(spec.snr_db)) throw ConfigError("snr_db must be finite");
  validate(b);
  double sum_i = 0.0, sum_i2 = 0.0, max_i = 0.0;
  for (double v : b.values) {
    const double intensity = v * v;
    sum_i += intensity;
    sum_i2 += intensity * intensity;
    max_i = std::max(max_i, intensity);
  }
  if (sum_i == 0.0) throw InvalidDataError("all-zero magnitudes cannot be noise-calibrated");

  // E||I_noisy - I||^2 = sum_j I_j / s, so this s realizes the requested
  // intensity-domain SNR in expectation.
  const double s = sum_i * std::pow(10.0, spec.snr_db / 10.0) / sum_i2;
  if (!std::isfinite(s) || s * max_i > kMaxMean) {
    throw CapacityError("photon scale overflows the exact counting range");
  }

  MagnitudeData out{b.shape, b.patterns, std::vector<double>(b.values.size())};
  for (std::size_t j = 0; j < b.values.size(); ++j) {
    const double mean = s * b.values[j] * b.values[j];
    // Per-entry stream: reproducible independently of evaluation order.
    std::mt19937_64 eng(splitmix64(spec.seed ^ (0xA24BAED4963EE407ull * (j + 1))));
    out.values[j] = std::sqrt(sample_poisson(mean, eng) / s);
  }
  return out;
}

}  // namespace phasekit
