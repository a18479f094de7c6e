#include "phasekit/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <numbers>
#include <random>
#include <sstream>

#include "format.hpp"

namespace phasekit {

namespace {

using detail::format_number;

struct Cursor {
  const std::string& buf;
  const std::string& path;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(path + ": " + msg + " (byte " + std::to_string(pos) + ")", pos);
  }
  void skip_space() {
    while (pos < buf.size()) {
      const char ch = buf[pos];
      if (ch == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }
  std::string token() {
    skip_space();
    if (pos >= buf.size()) fail("unexpected end of file");
    const std::size_t start = pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])) &&
           buf[pos] != '#') {
      ++pos;
    }
    return buf.substr(start, pos - start);
  }
  long integer(const char* what) {
    const std::size_t at = pos;
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      pos = at;
      fail(std::string("expected integer ") + what + ", got '" + t + "'");
    }
  }
};

SpatialImage synthetic_real(GridShape g) {
  SpatialImage x = SpatialImage::zeros(g, ImageKind::Real);
  const double r_span = g.n1 - 1;
  const double c_span = g.n2 - 1;
  auto inside = [](int i, int lo_num, int hi_num, int n) {
    return i >= (n * lo_num) / 100 && i < (n * hi_num) / 100;
  };
  double max_v = 0.0;
  for (int r = 0; r < g.n1; ++r) {
    for (int c = 0; c < g.n2; ++c) {
      double v = 0.18 + 0.42 * (r / r_span) + 0.22 * (c / c_span);
      if (inside(r, 15, 45, g.n1) && inside(c, 20, 50, g.n2)) v += 0.35;
      if (inside(r, 55, 90, g.n1) && inside(c, 60, 92, g.n2)) v += 0.28;
      if (inside(r, 28, 42, g.n1) && inside(c, 58, 80, g.n2)) v += 0.45;
      x.at(r, c) = Complex(v, 0.0);
      max_v = std::max(max_v, v);
    }
  }
  for (auto& v : x.values) v = Complex(v.real() / max_v, 0.0);
  return x;
}

}  // namespace

SpatialImage load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  Cursor cur{buf, path};

  const std::string magic = cur.token();
  if (magic == "P1" || magic == "P3" || magic == "P4" || magic == "P6") {
    throw UnsupportedFormatError(path + ": only grayscale portable graymaps (P2/P5) are supported, got " + magic);
  }
  if (magic != "P2" && magic != "P5") cur.fail("not a portable graymap, magic '" + magic + "'");
  const bool binary = (magic == "P5");

  const long width = cur.integer("width");
  const long height = cur.integer("height");
  const long maxval = cur.integer("maxval");
  if (width < 2 || height < 2) {
    throw DimensionError(path + ": image must be at least 2x2, got " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  if (maxval < 1 || maxval > 65535) cur.fail("maxval out of range");
  if (binary && maxval > 255) {
    throw UnsupportedFormatError(path + ": 16-bit binary graymaps are not supported");
  }

  GridShape shape(static_cast<int>(height), static_cast<int>(width));
  SpatialImage img = SpatialImage::zeros(shape, ImageKind::Real);
  const std::size_t count = shape.spatial_size();
  if (binary) {
    if (cur.pos >= buf.size()) cur.fail("missing pixel payload");
    ++cur.pos;  // single whitespace byte after maxval
    const std::size_t avail = buf.size() - cur.pos;
    if (avail < count) {
      throw FormatError(path + ": truncated pixel payload: expected " +
                            std::to_string(count) + " bytes, got " + std::to_string(avail),
                        buf.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto raw = static_cast<unsigned char>(buf[cur.pos + i]);
      img.values[i] = Complex(static_cast<double>(raw) / static_cast<double>(maxval), 0.0);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = cur.integer("pixel value");
      if (v < 0 || v > maxval) cur.fail("pixel value out of range");
      img.values[i] = Complex(static_cast<double>(v) / static_cast<double>(maxval), 0.0);
    }
  }
  return img;
}

SpatialImage make_phantom(const PhantomSpec& spec) {
  switch (spec.kind) {
    case PhantomKind::SyntheticReal:
      return synthetic_real(spec.size);
    case PhantomKind::FileReal:
      return load_image(spec.path);
    case PhantomKind::SyntheticComplex: {
      SpatialImage mag =
          spec.path.empty() ? synthetic_real(spec.size) : load_image(spec.path);
      SpatialImage out = SpatialImage::zeros(mag.shape, ImageKind::Complex);
      std::mt19937_64 eng(spec.seed);
      for (std::size_t i = 0; i < mag.values.size(); ++i) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        out.values[i] = mag.values[i].real() * std::polar(1.0, 2.0 * std::numbers::pi * u);
      }
      return out;
    }
  }
  throw ConfigError("unknown phantom kind");
}

void save_reconstruction(const SpatialImage& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image file: " + path);
  out.imbue(std::locale::classic());
  out << "P5\n" << x.shape.n2 << " " << x.shape.n1 << "\n255\n";
  for (const Complex& v : x.values) {
    const double mag = std::clamp(std::abs(v), 0.0, 1.0);
    out.put(static_cast<char>(std::lround(mag * 255.0)));
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_trace_csv(const SolverTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file: " + path);
  out.imbue(std::locale::classic());
  out << "iter,rel_err,residual\n";
  for (const TraceRecord& rec : trace.records) {
    out << rec.iter << ',' << format_number(rec.rel_err) << ',' << format_number(rec.residual) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sweep file: " + path);
  out.imbue(std::locale::classic());
  out << "image,beta,d1,d2,snr_db,seed,iters,final_rel_err\n";
  for (const SweepRow& row : rows) {
    out << row.image << ',' << format_number(row.beta) << ',' << format_number(row.d1) << ',' << format_number(row.d2)
        << ',' << format_number(row.snr_db) << ',' << row.seed << ',' << row.iters << ',';
    if (row.error_tag.empty()) {
      out << format_number(row.final_rel_err);
    } else {
      out << "error:" << row.error_tag;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace phasekit
