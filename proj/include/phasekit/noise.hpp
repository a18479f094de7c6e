#pragma once

#include <cstdint>

#include "phasekit/projections.hpp"

namespace phasekit {

// Poisson noise at a prescribed intensity-domain signal-to-noise ratio.
// Identical (spec, data) pairs produce bitwise-identical output.
struct NoiseSpec {
  double snr_db = 40.0;
  std::uint64_t seed = 1;
};

// Converts magnitudes to intensities I = b^2, scales them into photon counts
// so that the expected intensity-domain SNR equals snr_db, samples
// K_j ~ Poisson(s * I_j) with a per-entry seeded generator, and returns
// sqrt(K_j / s). Zero entries stay exactly zero.
MagnitudeData poissonize(const MagnitudeData& b, const NoiseSpec& spec);

}  // namespace phasekit
