#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasekit/field.hpp"
#include "phasekit/solver.hpp"

namespace phasekit {

enum class PhantomKind { SyntheticReal, FileReal, SyntheticComplex };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::SyntheticReal;
  GridShape size{32, 32};
  std::uint64_t seed = 7;
  // FileReal: the grayscale image to load (its own dimensions win).
  // SyntheticComplex: optional magnitude source; synthetic pattern when empty.
  std::string path;
};

// Reads a binary or ASCII portable graymap (P5/P2), scaled to [0, 1].
SpatialImage load_image(const std::string& path);

// SyntheticReal: deterministic piecewise pattern (rectangles over a gradient),
// normalized to max 1. SyntheticComplex: magnitude source times a seeded
// uniform random phase per pixel.
SpatialImage make_phantom(const PhantomSpec& spec);

// Writes |x| as an 8-bit binary graymap, clamped to [0, 1].
void save_reconstruction(const SpatialImage& x, const std::string& path);

// Columns: iter, rel_err, residual. 15 significant digits.
void save_trace_csv(const SolverTrace& trace, const std::string& path);

struct SweepRow {
  std::string image;
  double beta = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;      // NaN for one-pattern runs
  double snr_db = 0.0;  // +inf for noiseless runs
  std::uint64_t seed = 0;
  int iters = 0;
  double final_rel_err = 0.0;
  std::string error_tag;  // non-empty tags a failed cell
};

// Columns: image, beta, d1, d2, snr_db, seed, iters, final_rel_err.
void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace phasekit
