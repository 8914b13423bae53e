#pragma once

#include <chrono>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lkpm/observables.hpp"

namespace lkpm {

// Artifact writers.  Every emitter produces the full file as one string so
// outputs are bit-identical for identical inputs; doubles are printed as
// shortest round-trip decimals.

/// 64-bit FNV-1a content checksum.
std::uint64_t fnv1a(std::string_view bytes);

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double value);

/// Grid scan, imaginary axis outer: re_omega,im_omega,re_G,im_G,re_C,im_C,valid.
/// Shortest decimal form that parses back to the same double; every writer
/// below uses it, so callers can assemble byte-stable rows of their own.
std::string format_double(double value);

std::string csv_from_map(const SpectralMap& map);
/// t,re_C,im_C.
std::string csv_from_series(const TimeSeries& series);
/// gamma_axis,value.
std::string csv_from_projection(const ProjectedCorrelator& projection);
/// Mode list: re_lambda,im_lambda,overlap_weight.
std::string csv_from_modes(const CVec& values, const RVec& weights);
/// MPS bond-growth trace: step,site,bond.
std::string csv_from_bond_log(const std::vector<BondLogEntry>& log);
/// Relaxation summary with the peak list and the cut that produced it.
std::string json_from_relaxation(const RelaxationRate& rate, double height_cut);
/// Heatmap of |C| over the grid, linear color scale, invalid nodes gray.
std::string svg_from_map(const SpectralMap& map);

// Per-run summary: command, backend, wall time, free-form notes, and a
// manifest entry (size + checksum) for every file that was written.
class RunReport {
 public:
  RunReport(std::string command, std::string backend);

  void note(const std::string& key, const std::string& value);
  void note(const std::string& key, const char* value);
  void note(const std::string& key, double value);
  void note(const std::string& key, bool value);
  template <std::integral T>
  void note(const std::string& key, T value) {
    note_int(key, static_cast<std::int64_t>(value));
  }
  void note_diagnostics(const KpmDiagnostics& diag);

  /// Writes bytes to dir/name (creating dir) and records the manifest entry.
  void emit(const std::string& dir, const std::string& name,
            std::string_view bytes);

  /// Serialized report, including wall time since construction.
  std::string to_json() const;
  /// Writes to_json() to dir/report.json; returns the path written.
  std::string write(const std::string& dir) const;

 private:
  using Value = std::variant<std::string, double, std::int64_t, bool>;
  struct FileEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::uint64_t checksum = 0;
  };

  void note_int(const std::string& key, std::int64_t value);

  std::string command_;
  std::string backend_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, Value>> notes_;
  std::vector<FileEntry> files_;
};

}  // namespace lkpm
