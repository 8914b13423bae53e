#include "lkpm/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace lkpm {

namespace {

using OrderedJson = nlohmann::ordered_json;

void append_double(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

std::string hex64(std::uint64_t value) {
  char buf[19] = "0x";
  for (int k = 0; k < 16; ++k) {
    buf[2 + k] = "0123456789abcdef"[(value >> (60 - 4 * k)) & 0xf];
  }
  return std::string(buf, 18);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string format_double(double value) {
  std::string out;
  append_double(out, value);
  return out;
}

std::string csv_from_map(const SpectralMap& map) {
  std::string out = "re_omega,im_omega,re_G,im_G,re_C,im_C,valid\n";
  for (int j = 0; j < map.grid.n_im; ++j) {
    for (int i = 0; i < map.grid.n_re; ++i) {
      const Cplx w = map.grid.node(i, j);
      append_double(out, w.real());
      out += ',';
      append_double(out, w.imag());
      out += ',';
      append_double(out, map.greens(j, i).real());
      out += ',';
      append_double(out, map.greens(j, i).imag());
      out += ',';
      append_double(out, map.corr(j, i).real());
      out += ',';
      append_double(out, map.corr(j, i).imag());
      out += ',';
      out += map.valid(j, i) != 0 ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::string csv_from_series(const TimeSeries& series) {
  std::string out = "t,re_C,im_C\n";
  for (Eigen::Index k = 0; k < series.times.size(); ++k) {
    append_double(out, series.times[k]);
    out += ',';
    append_double(out, series.values[k].real());
    out += ',';
    append_double(out, series.values[k].imag());
    out += '\n';
  }
  return out;
}

std::string csv_from_projection(const ProjectedCorrelator& projection) {
  std::string out = "gamma_axis,value\n";
  for (Eigen::Index k = 0; k < projection.gammas.size(); ++k) {
    append_double(out, projection.gammas[k]);
    out += ',';
    append_double(out, projection.values[k]);
    out += '\n';
  }
  return out;
}

std::string csv_from_modes(const CVec& values, const RVec& weights) {
  if (values.size() != weights.size()) {
    throw ConfigError("mode values and weights differ in length");
  }
  std::string out = "re_lambda,im_lambda,overlap_weight\n";
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    append_double(out, values[n].real());
    out += ',';
    append_double(out, values[n].imag());
    out += ',';
    append_double(out, weights[n]);
    out += '\n';
  }
  return out;
}

std::string csv_from_bond_log(const std::vector<BondLogEntry>& log) {
  std::string out = "step,site,bond\n";
  for (const BondLogEntry& entry : log) {
    out += std::to_string(entry.step);
    out += ',';
    out += std::to_string(entry.site);
    out += ',';
    out += std::to_string(entry.bond);
    out += '\n';
  }
  return out;
}

std::string json_from_relaxation(const RelaxationRate& rate,
                                 double height_cut) {
  OrderedJson j;
  j["found"] = rate.found;
  j["delta"] = rate.delta;
  j["height_cut"] = height_cut;
  j["peaks"] = OrderedJson::array();
  for (const PeakInfo& peak : rate.peaks) {
    j["peaks"].push_back({{"re", peak.position.real()},
                          {"im", peak.position.imag()},
                          {"height", peak.height}});
  }
  return j.dump(2) + "\n";
}

std::string svg_from_map(const SpectralMap& map) {
  constexpr int kCell = 4;
  const int n_re = map.grid.n_re;
  const int n_im = map.grid.n_im;
  double top = 0.0;
  for (int j = 0; j < n_im; ++j) {
    for (int i = 0; i < n_re; ++i) {
      if (map.valid(j, i) != 0) {
        top = std::max(top, std::abs(map.corr(j, i)));
      }
    }
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(n_re * kCell) + "\" height=\"" +
                    std::to_string(n_im * kCell) + "\">\n<title>|C| over [" +
                    format_double(map.grid.re_min) + "," +
                    format_double(map.grid.re_max) + "] x [" +
                    format_double(map.grid.im_min) + "," +
                    format_double(map.grid.im_max) + "], max " +
                    format_double(top) + "</title>\n";
  for (int j = 0; j < n_im; ++j) {
    for (int i = 0; i < n_re; ++i) {
      int r = 235, g = 235, b = 235;
      if (map.valid(j, i) != 0) {
        const double t =
            top > 0.0 ? std::abs(map.corr(j, i)) / top : 0.0;
        r = static_cast<int>(std::lround(255.0 + t * (103.0 - 255.0)));
        g = static_cast<int>(std::lround(255.0 - t * 255.0));
        b = static_cast<int>(std::lround(255.0 + t * (31.0 - 255.0)));
      }
      out += "<rect x=\"" + std::to_string(i * kCell) + "\" y=\"" +
             std::to_string((n_im - 1 - j) * kCell) + "\" width=\"4\" " +
             "height=\"4\" fill=\"rgb(" + std::to_string(r) + "," +
             std::to_string(g) + "," + std::to_string(b) + ")\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

RunReport::RunReport(std::string command, std::string backend)
    : command_(std::move(command)),
      backend_(std::move(backend)),
      start_(std::chrono::steady_clock::now()) {}

void RunReport::note(const std::string& key, const std::string& value) {
  notes_.emplace_back(key, Value(value));
}

void RunReport::note(const std::string& key, const char* value) {
  notes_.emplace_back(key, Value(std::string(value)));
}

void RunReport::note(const std::string& key, double value) {
  notes_.emplace_back(key, Value(value));
}

void RunReport::note(const std::string& key, bool value) {
  notes_.emplace_back(key, Value(value));
}

void RunReport::note_int(const std::string& key, std::int64_t value) {
  notes_.emplace_back(key, Value(value));
}

void RunReport::note_diagnostics(const KpmDiagnostics& diag) {
  note("kpm_scale", diag.scale);
  note("kpm_moments", diag.n_moments);
  note("nodes_computed", diag.nodes_computed);
  note("max_trunc_error", diag.max_trunc_error);
  note("max_bond", diag.max_bond);
  note("symmetry_residual", diag.symmetry_residual);
}

void RunReport::emit(const std::string& dir, const std::string& name,
                     std::string_view bytes) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ResourceError("cannot write output file '" + path.string() + "'");
  }
  files_.push_back({name, bytes.size(), fnv1a(bytes)});
}

std::string RunReport::to_json() const {
  OrderedJson j;
  j["command"] = command_;
  j["backend"] = backend_;
  j["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();
  OrderedJson notes = OrderedJson::object();
  for (const auto& [key, value] : notes_) {
    std::visit([&notes, &key](const auto& v) { notes[key] = v; }, value);
  }
  j["notes"] = notes;
  j["files"] = OrderedJson::array();
  for (const FileEntry& file : files_) {
    j["files"].push_back({{"name", file.name},
                          {"bytes", file.bytes},
                          {"fnv1a", hex64(file.checksum)}});
  }
  return j.dump(2) + "\n";
}

std::string RunReport::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / "report.json";
  const std::string body = to_json();
  std::ofstream out(path, std::ios::binary);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) {
    throw ResourceError("cannot write report '" + path.string() + "'");
  }
  return path.string();
}

}  // namespace lkpm
