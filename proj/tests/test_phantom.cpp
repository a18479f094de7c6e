#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <locale>
#include <fstream>
#include <sstream>
#include <string>

#include "phasekit/phantom.hpp"

using namespace phasekit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "phasekit_phantom_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("ASCII graymap parsing") {
  const fs::path p = temp_dir() / "tiny.pgm";
  write_file(p, "P2\n2 2\n255\n0 255\n128 64\n");
  const SpatialImage img = load_image(p.string());
  CHECK(img.shape.n1 == 2);
  CHECK(img.shape.n2 == 2);
  CHECK(img.kind == ImageKind::Real);
  CHECK(img.values[0].real() == doctest::Approx(0.0));
  CHECK(img.values[1].real() == doctest::Approx(1.0));
  CHECK(img.values[2].real() == doctest::Approx(128.0 / 255.0));
  CHECK(img.values[3].real() == doctest::Approx(64.0 / 255.0));
}

TEST_CASE("comments and odd whitespace are tolerated") {
  const fs::path p = temp_dir() / "comments.pgm";
  write_file(p, "P2 # magic\n# a comment line\n 2\t2 \n# another\n255\n1 2 3 4\n");
  const SpatialImage img = load_image(p.string());
  CHECK(img.values[3].real() == doctest::Approx(4.0 / 255.0));
}

TEST_CASE("truncated binary payload names the missing bytes") {
  const fs::path p = temp_dir() / "truncated.pgm";
  std::string content = "P5\n3 3\n255\n";
  content += std::string(4, '\x7f');  // 4 of 9 payload bytes
  write_file(p, content);
  try {
    load_image(p.string());
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected 9 bytes") != std::string::npos);
    CHECK(msg.find("got 4") != std::string::npos);
  }
}

TEST_CASE("color maps are rejected, garbage is a format error") {
  const fs::path p6 = temp_dir() / "color.ppm";
  write_file(p6, "P6\n2 2\n255\n" + std::string(12, '\0'));
  CHECK_THROWS_AS(load_image(p6.string()), UnsupportedFormatError);

  const fs::path bad = temp_dir() / "bad.pgm";
  write_file(bad, "BM not a graymap");
  CHECK_THROWS_AS(load_image(bad.string()), FormatError);

  CHECK_THROWS_AS(load_image((temp_dir() / "missing.pgm").string()), IoError);
}

TEST_CASE("save and reload an 8-bit image losslessly") {
  const GridShape g(8, 5);
  SpatialImage img = SpatialImage::zeros(g, ImageKind::Real);
  std::uint32_t state = 12345;
  for (auto& v : img.values) {
    state = state * 1664525u + 1013904223u;
    v = Complex((state >> 24) / 255.0, 0.0);  // already on the 8-bit lattice
  }
  const fs::path p = temp_dir() / "roundtrip.pgm";
  save_reconstruction(img, p.string());
  const SpatialImage back = load_image(p.string());
  REQUIRE(back.shape == g);
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    CHECK(back.values[i].real() == doctest::Approx(img.values[i].real()).epsilon(1e-12));
  }
}

TEST_CASE("constant-magnitude complex images quantize to a flat gray") {
  const GridShape g(4, 4);
  SpatialImage img = SpatialImage::zeros(g, ImageKind::Complex);
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    img.values[i] = std::polar(0.5, 0.37 * static_cast<double>(i));
  }
  const fs::path p = temp_dir() / "flat.pgm";
  save_reconstruction(img, p.string());
  const std::string raw = read_file(p.string());
  const std::string payload = raw.substr(raw.size() - g.spatial_size());
  for (char byte : payload) {
    CHECK(static_cast<int>(static_cast<unsigned char>(byte)) == 128);
  }
}

TEST_CASE("synthetic phantoms are deterministic and normalized") {
  const PhantomSpec real_spec{PhantomKind::SyntheticReal, GridShape(32, 32), 7, ""};
  const SpatialImage a = make_phantom(real_spec);
  const SpatialImage b = make_phantom(real_spec);
  double max_v = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] == b.values[i]);
    CHECK(a.values[i].real() >= 0.0);
    CHECK(a.values[i].imag() == 0.0);
    max_v = std::max(max_v, a.values[i].real());
  }
  CHECK(max_v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complex phantoms keep the source magnitudes") {
  const PhantomSpec spec{PhantomKind::SyntheticComplex, GridShape(16, 16), 21, ""};
  const SpatialImage z = make_phantom(spec);
  const SpatialImage mag = make_phantom({PhantomKind::SyntheticReal, GridShape(16, 16), 21, ""});
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    CHECK(std::abs(z.values[i]) == doctest::Approx(mag.values[i].real()).epsilon(1e-12));
  }
  const SpatialImage again = make_phantom(spec);
  for (std::size_t i = 0; i < z.values.size(); ++i) CHECK(z.values[i] == again.values[i]);
  const SpatialImage other = make_phantom({PhantomKind::SyntheticComplex, GridShape(16, 16), 22, ""});
  bool differs = false;
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    if (z.values[i] != other.values[i]) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("trace CSV layout") {
  SolverTrace trace;
  trace.records = {{1, 0.5, 0.25}, {2, 0.25, 0.125}, {3, 0.125, 0.0625}};
  trace.reconstruction = SpatialImage::zeros(GridShape(2, 2), ImageKind::Real);
  const fs::path p = temp_dir() / "trace.csv";
  save_trace_csv(trace, p.string());
  const std::string content = read_file(p);
  CHECK(std::count(content.begin(), content.end(), '\n') == 4);
  CHECK(content.rfind("iter,rel_err,residual\n", 0) == 0);
  CHECK(content.find("3,0.125,0.0625\n") != std::string::npos);
}

namespace {

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("numeric output ignores the global locale") {
  const std::locale previous =
      std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  SolverTrace trace;
  trace.records = {{1000, 0.125, 1234.5}};
  trace.reconstruction = SpatialImage::zeros(GridShape(2, 2), ImageKind::Real);
  const fs::path p = temp_dir() / "locale.csv";
  save_trace_csv(trace, p.string());
  std::locale::global(previous);
  const std::string content = read_file(p);
  CHECK(content.find("1000,0.125,1234.5\n") != std::string::npos);
}

TEST_CASE("sweep CSV schema and error tags") {
  std::vector<SweepRow> rows(2);
  rows[0] = {"synthetic-real", 0.8, 3.0, std::nan(""), 40.0, 1, 150, 0.001, ""};
  rows[1] = {"synthetic-real", 1.0, 3.0, std::nan(""), 40.0, 2, 0, 0.0, "solver-blew-up"};
  const fs::path p = temp_dir() / "sweep.csv";
  save_sweep_csv(rows, p.string());
  const std::string content = read_file(p);
  CHECK(content.rfind("image,beta,d1,d2,snr_db,seed,iters,final_rel_err\n", 0) == 0);
  CHECK(content.find("synthetic-real,0.8,3,nan,40,1,150,0.001\n") != std::string::npos);
  CHECK(content.find("error:solver-blew-up") != std::string::npos);
}
