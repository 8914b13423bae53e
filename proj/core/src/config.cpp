#include "lkpm/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace lkpm {

namespace {

struct Cursor {
  const std::string& source;
  int line = 0;
};

[[noreturn]] void fail(const Cursor& at, const std::string& message) {
  throw ConfigError(at.source + ":" + std::to_string(at.line) + ": " +
                    message);
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

double parse_double(const Cursor& at, const std::string& key,
                    const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    fail(at, "key '" + key + "' expects a number, got '" + value + "'");
  }
  return parsed;
}

int parse_int(const Cursor& at, const std::string& key,
              const std::string& value) {
  char* end = nullptr;
  const long parsed = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    fail(at, "key '" + key + "' expects an integer, got '" + value + "'");
  }
  return static_cast<int>(parsed);
}

bool parse_bool(const Cursor& at, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "on" || value == "1") {
    return true;
  }
  if (value == "false" || value == "off" || value == "0") {
    return false;
  }
  fail(at, "key '" + key + "' expects true/false, got '" + value + "'");
}

class Parser {
 public:
  explicit Parser(RunConfig& config) : config_(config) {}

  void entry(const Cursor& at, const std::string& section,
             const std::string& key, const std::string& value) {
    if (!seen_.insert(section + "/" + key).second) {
      fail(at, "duplicate key '" + key + "'" +
                   (section.empty() ? "" : " in [" + section + "]"));
    }
    if (section.empty()) {
      toplevel(at, key, value);
    } else if (section == "model") {
      model(at, key, value);
    } else if (section == "kpm") {
      kpm(at, key, value);
    } else if (section == "grid") {
      grid(at, key, value);
    } else if (section == "backend") {
      backend(at, key, value);
    } else if (section == "mps") {
      mps(at, key, value);
    } else if (section == "dynamics") {
      dynamics(at, key, value);
    } else if (section == "scan") {
      scan(at, key, value);
    } else if (section == "output") {
      output(at, key, value);
    } else {
      fail(at, "unknown section [" + section + "]");
    }
  }

  void begin_section(const Cursor& at, const std::string& section) {
    if (!schema_seen_) {
      fail(at, "'schema = 1' must appear before the first section");
    }
    static const std::set<std::string> known = {
        "model", "kpm",      "grid", "backend",
        "mps",   "dynamics", "scan", "output"};
    if (known.count(section) == 0) {
      fail(at, "unknown section [" + section + "]");
    }
    if (section == "scan" && !config_.scan) {
      config_.scan.emplace();
    }
  }

  void finish(const std::string& source) const {
    if (!schema_seen_) {
      throw ConfigError(source + ": missing required top-level 'schema' key");
    }
  }

 private:
  [[noreturn]] static void unknown(const Cursor& at, const std::string& section,
                                   const std::string& key) {
    fail(at, "unknown key '" + key + "' in [" + section + "]");
  }

  void toplevel(const Cursor& at, const std::string& key,
                const std::string& value) {
    if (key != "schema") {
      fail(at, "unknown top-level key '" + key + "'");
    }
    if (parse_int(at, key, value) != 1) {
      fail(at, "unsupported schema version '" + value + "' (expected 1)");
    }
    schema_seen_ = true;
  }

  void model(const Cursor& at, const std::string& key,
             const std::string& value) {
    if (key == "n_sites") {
      config_.model.n_sites = parse_int(at, key, value);
    } else if (key == "jx") {
      config_.model.jx = parse_double(at, key, value);
    } else if (key == "jy") {
      config_.model.jy = parse_double(at, key, value);
    } else if (key == "jz") {
      config_.model.jz = parse_double(at, key, value);
    } else if (key == "b") {
      config_.model.b = parse_double(at, key, value);
    } else if (key == "gamma") {
      config_.model.gamma = parse_double(at, key, value);
    } else if (key == "basis") {
      if (value == "interleaved") {
        config_.basis = VectorBasis::Interleaved;
      } else if (value == "stacked") {
        config_.basis = VectorBasis::Stacked;
      } else {
        fail(at, "basis must be 'interleaved' or 'stacked', got '" + value +
                     "'");
      }
    } else {
      unknown(at, "model", key);
    }
  }

  void kpm(const Cursor& at, const std::string& key,
           const std::string& value) {
    if (key == "n_moments") {
      config_.kpm.n_moments = parse_int(at, key, value);
    } else if (key == "scale") {
      config_.kpm.scale = parse_double(at, key, value);
    } else if (key == "use_mirror") {
      config_.kpm.use_mirror = parse_bool(at, key, value);
    } else {
      unknown(at, "kpm", key);
    }
  }

  void grid(const Cursor& at, const std::string& key,
            const std::string& value) {
    if (key == "re_min") {
      config_.grid.re_min = parse_double(at, key, value);
    } else if (key == "re_max") {
      config_.grid.re_max = parse_double(at, key, value);
    } else if (key == "n_re") {
      config_.grid.n_re = parse_int(at, key, value);
    } else if (key == "im_min") {
      config_.grid.im_min = parse_double(at, key, value);
    } else if (key == "im_max") {
      config_.grid.im_max = parse_double(at, key, value);
    } else if (key == "n_im") {
      config_.grid.n_im = parse_int(at, key, value);
    } else {
      unknown(at, "grid", key);
    }
  }

  void backend(const Cursor& at, const std::string& key,
               const std::string& value) {
    if (key == "kind") {
      if (value == "dense") {
        config_.backend = Backend::Dense;
      } else if (value == "mps") {
        config_.backend = Backend::Mps;
      } else {
        fail(at, "backend kind must be 'dense' or 'mps', got '" + value + "'");
      }
    } else if (key == "workers") {
      config_.workers = parse_int(at, key, value);
    } else {
      unknown(at, "backend", key);
    }
  }

  void mps(const Cursor& at, const std::string& key,
           const std::string& value) {
    if (key == "max_bond") {
      config_.mps.chi_max = parse_int(at, key, value);
    } else if (key == "cutoff") {
      config_.mps.eps = parse_double(at, key, value);
    } else {
      unknown(at, "mps", key);
    }
  }

  void dynamics(const Cursor& at, const std::string& key,
                const std::string& value) {
    if (key == "t_max") {
      config_.dynamics.t_max = parse_double(at, key, value);
    } else if (key == "n_samples") {
      config_.dynamics.n_samples = parse_int(at, key, value);
    } else {
      unknown(at, "dynamics", key);
    }
  }

  void scan(const Cursor& at, const std::string& key,
            const std::string& value) {
    if (key == "gamma_min") {
      config_.scan->gamma_min = parse_double(at, key, value);
    } else if (key == "gamma_max") {
      config_.scan->gamma_max = parse_double(at, key, value);
    } else if (key == "n_points") {
      config_.scan->n_points = parse_int(at, key, value);
    } else {
      unknown(at, "scan", key);
    }
  }

  void output(const Cursor& at, const std::string& key,
              const std::string& value) {
    if (key == "dir") {
      if (value.empty()) {
        fail(at, "output dir must not be empty");
      }
      config_.output.dir = value;
    } else if (key == "svg") {
      config_.output.svg = parse_bool(at, key, value);
    } else {
      unknown(at, "output", key);
    }
  }

  RunConfig& config_;
  std::set<std::string> seen_;
  bool schema_seen_ = false;
};

}  // namespace

const char* backend_name(Backend backend) {
  return backend == Backend::Dense ? "dense" : "mps";
}

void RunConfig::validate() const {
  model.validate();
  kpm.validate();
  grid.validate();
  if (workers < 1) {
    throw ConfigError("backend: workers must be at least 1");
  }
  if (mps.chi_max < 1) {
    throw ConfigError("mps: max_bond must be at least 1");
  }
  if (!(mps.eps >= 0.0)) {
    throw ConfigError("mps: cutoff must be nonnegative");
  }
  if (!(dynamics.t_max >= 0.0)) {
    throw ConfigError("dynamics: t_max must be nonnegative");
  }
  if (dynamics.n_samples < 1) {
    throw ConfigError("dynamics: n_samples must be at least 1");
  }
  if (scan) {
    if (!(scan->gamma_min >= 0.0)) {
      throw ConfigError("scan: gamma_min must be nonnegative");
    }
    if (scan->n_points < 1) {
      throw ConfigError("scan: n_points must be at least 1");
    }
    if (scan->n_points > 1 && !(scan->gamma_max > scan->gamma_min)) {
      throw ConfigError("scan: gamma_max must exceed gamma_min");
    }
  }
}

RunConfig parse_config(const std::string& text,
                       const std::string& source_name) {
  RunConfig config;
  Parser parser(config);
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  Cursor at{source_name, 0};
  while (std::getline(stream, raw)) {
    ++at.line;
    const std::size_t comment = raw.find_first_of("#;");
    const std::string line = trim(
        std::string_view(raw).substr(0, comment == std::string::npos
                                            ? raw.size()
                                            : comment));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        fail(at, "malformed section header '" + line + "'");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      parser.begin_section(at, section);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(at, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      fail(at, "missing key before '='");
    }
    parser.entry(at, section, key, value);
  }
  parser.finish(source_name);
  try {
    config.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(source_name + ": " + err.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace lkpm
