#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lkpm/report.hpp"

using namespace lkpm;

namespace {

SpectralMap tiny_map() {
  SpectralMap map;
  map.grid = FrequencyGrid{-1.0, 1.0, 3, -1.0, 1.0, 3};
  map.greens = CMat::Zero(3, 3);
  map.corr = CMat::Zero(3, 3);
  map.valid.setZero(3, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      map.greens(j, i) = Cplx(10.0 * j + i, -1.0);
      map.corr(j, i) = Cplx(0.25 * (j + 1) * (i + 1), 0.5);
    }
  }
  map.valid(1, 1) = 1;
  return map;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    n += c == '\n' ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("checksum matches the published fnv-1a vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("doubles print as shortest round-trip decimals") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678901234567.0, 0.0}) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
    CHECK(format_double(v) == text);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("map goes out imaginary-axis outer with a validity flag") {
  const SpectralMap map = tiny_map();
  const std::string csv = csv_from_map(map);
  CHECK(count_lines(csv) == 10);
  CHECK(csv.rfind("re_omega,im_omega,re_G,im_G,re_C,im_C,valid\n", 0) == 0);

  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);  // header
  std::getline(rows, line);
  CHECK(line == "-1,-1,0,-1,0.25,0.5,0");
  for (int skip = 0; skip < 4; ++skip) {
    std::getline(rows, line);
  }
  CHECK(line == "0,0,11,-1,1,0.5,1");  // the single valid interior node

  SUBCASE("identical map serializes to identical bytes") {
    CHECK(csv_from_map(tiny_map()) == csv);
  }
}

TEST_CASE("series, projection, mode, and bond-log writers") {
  TimeSeries series;
  series.times = RVec::Zero(2);
  series.times << 0.0, 0.5;
  series.values = CVec::Zero(2);
  series.values << Cplx(1.0, 0.0), Cplx(0.25, -0.125);
  CHECK(csv_from_series(series) == "t,re_C,im_C\n0,1,0\n0.5,0.25,-0.125\n");

  ProjectedCorrelator projection;
  projection.gammas = RVec::Zero(2);
  projection.gammas << -0.5, -0.25;
  projection.values = RVec::Zero(2);
  projection.values << 2.0, 0.75;
  CHECK(csv_from_projection(projection) ==
        "gamma_axis,value\n-0.5,2\n-0.25,0.75\n");

  CVec modes(2);
  modes << Cplx(-0.5, 1.0), Cplx(0.0, 0.0);
  RVec weights(2);
  weights << 0.125, 1.0;
  CHECK(csv_from_modes(modes, weights) ==
        "re_lambda,im_lambda,overlap_weight\n-0.5,1,0.125\n0,0,1\n");
  CHECK_THROWS_AS(csv_from_modes(modes, RVec::Zero(3)), ConfigError);

  const std::vector<BondLogEntry> log = {{1, 0, 2}, {3, 4, 16}};
  CHECK(csv_from_bond_log(log) == "step,site,bond\n1,0,2\n3,4,16\n");
}

TEST_CASE("relaxation summary is valid json") {
  RelaxationRate rate;
  rate.found = true;
  rate.delta = 0.52;
  rate.peaks = {{Cplx(-0.52, 1.4), 0.3}, {Cplx(-0.9, 0.0), 0.1}};
  const auto parsed =
      nlohmann::json::parse(json_from_relaxation(rate, 1e-3));
  CHECK(parsed["found"] == true);
  CHECK(parsed["delta"] == 0.52);
  CHECK(parsed["height_cut"] == 1e-3);
  REQUIRE(parsed["peaks"].size() == 2);
  CHECK(parsed["peaks"][0]["re"] == -0.52);
  CHECK(parsed["peaks"][1]["height"] == 0.1);
}

TEST_CASE("heatmap draws one cell per node") {
  const SpectralMap map = tiny_map();
  const std::string svg = svg_from_map(map);
  CHECK(svg.rfind("<svg ", 0) == 0);
  std::size_t rects = 0;
  for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
       pos = svg.find("<rect", pos + 1)) {
    ++rects;
  }
  CHECK(rects == 9);
  CHECK(svg.find("rgb(235,235,235)") != std::string::npos);  // invalid nodes
  CHECK(svg.find("rgb(103,0,31)") != std::string::npos);  // the full-scale node
  CHECK(svg_from_map(map) == svg);
}

TEST_CASE("run report carries notes and a checksummed manifest") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "lkpm_report_test";
  fs::remove_all(dir);

  RunReport report("spectrum", "dense");
  report.note("config", "demo.ini");
  report.note("n_moments", 512);
  report.note("scale", 5.25);
  report.note("mirrored", true);
  report.emit(dir.string(), "a.csv", "x,y\n1,2\n");
  report.emit(dir.string(), "b.csv", "");
  const std::string path = report.write(dir.string());

  std::ifstream in(path);
  REQUIRE(in.good());
  const auto parsed = nlohmann::json::parse(in);
  CHECK(parsed["command"] == "spectrum");
  CHECK(parsed["backend"] == "dense");
  CHECK(parsed["wall_seconds"].get<double>() >= 0.0);
  CHECK(parsed["notes"]["config"] == "demo.ini");
  CHECK(parsed["notes"]["n_moments"] == 512);
  CHECK(parsed["notes"]["scale"] == 5.25);
  CHECK(parsed["notes"]["mirrored"] == true);
  REQUIRE(parsed["files"].size() == 2);
  CHECK(parsed["files"][0]["name"] == "a.csv");
  CHECK(parsed["files"][0]["bytes"] == 8);
  CHECK(parsed["files"][0]["fnv1a"] ==
        "0x" + [] {
          char buf[17];
          std::snprintf(buf, sizeof(buf), "%016lx", fnv1a("x,y\n1,2\n"));
          return std::string(buf);
        }());
  CHECK(parsed["files"][1]["fnv1a"] == "0xcbf29ce484222325");

  // the emitted files really are on disk with the recorded size
  CHECK(fs::file_size(dir / "a.csv") == 8);
  CHECK(fs::file_size(dir / "b.csv") == 0);
  fs::remove_all(dir);
}

}  // TEST_SUITE
