#pragma once

#include <optional>
#include <string>

#include "lkpm/nhkpm.hpp"
#include "lkpm/tn.hpp"
#include "lkpm/vectorize.hpp"

namespace lkpm {

// Run descriptions live in a versioned key/section text format so that
// figure-reproduction recipes can be committed next to the code.  Layout:
//
//   schema = 1            required, before any section
//   [model]   n_sites jx jy jz b gamma basis
//   [kpm]     n_moments scale use_mirror
//   [grid]    re_min re_max n_re im_min im_max n_im
//   [backend] kind (dense|mps) workers
//   [mps]     max_bond cutoff
//   [dynamics] t_max n_samples
//   [scan]    gamma_min gamma_max n_points
//   [output]  dir svg
//
// '#' or ';' start a comment, every key is optional (defaults below), and
// unknown sections, unknown keys, duplicates, and malformed values are
// rejected with file:line diagnostics.

enum class Backend { Dense, Mps };

const char* backend_name(Backend backend);

struct DynamicsConfig {
  double t_max = 20.0;
  int n_samples = 201;
};

// Dissipation sweep for locating the Zeno crossover.
struct ScanConfig {
  double gamma_min = 0.1;
  double gamma_max = 1.0;
  int n_points = 10;
};

struct OutputConfig {
  std::string dir = ".";
  bool svg = false;
};

struct RunConfig {
  ModelParams model;
  VectorBasis basis = VectorBasis::Interleaved;
  KpmParams kpm;
  FrequencyGrid grid;
  Backend backend = Backend::Dense;
  int workers = 1;
  MpsOptions mps;
  DynamicsConfig dynamics;
  std::optional<ScanConfig> scan;  // present iff the file has a [scan] section
  OutputConfig output;

  /// Semantic checks across all blocks; messages carry no line numbers
  /// because they concern combinations, not single entries.
  void validate() const;
};

/// Parses and validates config text; source_name prefixes diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source_name);

/// Reads the file and delegates to parse_config.
RunConfig load_config(const std::string& path);

}  // namespace lkpm
