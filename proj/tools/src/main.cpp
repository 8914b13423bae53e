// liouv: command line front end for the Liouvillian kernel polynomial
// library.  Every subcommand reads one run description (defaults when no
// --config is given), writes its artifacts plus a report.json manifest into
// the output directory, and exits 0 on success, 1 on a violated numerical
// invariant, 2 on bad configuration, 3 on a resource limit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lkpm/config.hpp"
#include "lkpm/observables.hpp"
#include "lkpm/oracles.hpp"
#include "lkpm/report.hpp"

namespace {

using namespace lkpm;

RVec linspace(double lo, double hi, int n) {
  RVec out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int k = 0; k < n; ++k) out[k] = lo + (hi - lo) * k / (n - 1);
  return out;
}

// Command line values layered on top of the config file.
struct CliOptions {
  std::string config_path;
  std::string backend;
  int workers = 0;
  std::vector<double> refine;
  bool svg = false;
};

RunConfig resolve_config(const CliOptions& cli) {
  RunConfig cfg = cli.config_path.empty() ? RunConfig{} : load_config(cli.config_path);
  if (!cli.backend.empty())
    cfg.backend = cli.backend == "mps" ? Backend::Mps : Backend::Dense;
  if (cli.workers > 0) cfg.workers = cli.workers;
  if (!cli.refine.empty()) {
    cfg.grid.re_min = cli.refine[0];
    cfg.grid.re_max = cli.refine[1];
    cfg.grid.im_min = cli.refine[2];
    cfg.grid.im_max = cli.refine[3];
  }
  if (cli.svg) cfg.output.svg = true;
  cfg.validate();
  return cfg;
}

std::string output_dir(const RunConfig& cfg) {
  const char* env = std::getenv("LIOUV_OUTPUT_DIR");
  return (env != nullptr && *env != '\0') ? std::string(env) : cfg.output.dir;
}

void describe_run(RunReport& report, const RunConfig& cfg) {
  report.note("n_sites", cfg.model.n_sites);
  report.note("jx", cfg.model.jx);
  report.note("jy", cfg.model.jy);
  report.note("jz", cfg.model.jz);
  report.note("b", cfg.model.b);
  report.note("gamma", cfg.model.gamma);
  report.note("basis", cfg.basis == VectorBasis::Interleaved ? "interleaved" : "stacked");
  report.note("workers", cfg.workers);
}

// Runs the command body with a report that is flushed even on failure, so a
// crashed run still leaves its parameters and the error on disk.
template <typename Body>
int guarded(const std::string& command, const RunConfig& cfg, Body&& body) {
  RunReport report(command, backend_name(cfg.backend));
  describe_run(report, cfg);
  const std::string dir = output_dir(cfg);
  try {
    return body(report, dir);
  } catch (const std::exception& e) {
    report.note("error", std::string(e.what()));
    try {
      report.write(dir);
    } catch (...) {
      // the error itself still propagates below
    }
    throw;
  }
}

void require_interleaved(const RunConfig& cfg) {
  if (cfg.basis != VectorBasis::Interleaved)
    throw ConfigError(
        "the mps backend needs basis = interleaved: the stacked layout makes "
        "dephasing couplings long range");
}

SpectralMap compute_map(const RunConfig& cfg) {
  const PauliTerms lt = vectorized_liouvillian(cfg.model, cfg.basis);
  if (cfg.backend == Backend::Dense) {
    const ProbePair pr = probe_vectors(cfg.model, cfg.basis);
    return spectral_map_dense(lt, pr.left, pr.right, cfg.grid, cfg.kpm, cfg.workers);
  }
  require_interleaved(cfg);
  const MpsProbePair pr = mps_probe_vectors(cfg.model);
  return spectral_map_mps(lt, pr.left, pr.right, cfg.grid, cfg.kpm, cfg.mps, cfg.workers);
}

ProjectedCorrelator compute_projection(const RunConfig& cfg, const RVec& gammas) {
  const PauliTerms lt = vectorized_liouvillian(cfg.model, cfg.basis);
  if (cfg.backend == Backend::Dense) {
    const ProbePair pr = probe_vectors(cfg.model, cfg.basis);
    return projected_correlator_dense(lt, pr.left, pr.right, gammas, cfg.grid.im_min,
                                      cfg.grid.im_max, cfg.grid.n_im, cfg.kpm, cfg.workers);
  }
  require_interleaved(cfg);
  const MpsProbePair pr = mps_probe_vectors(cfg.model);
  return projected_correlator_mps(lt, pr.left, pr.right, gammas, cfg.grid.im_min,
                                  cfg.grid.im_max, cfg.grid.n_im, cfg.kpm, cfg.mps,
                                  cfg.workers);
}

// Fixed step integration that lands exactly on n_samples uniform times by
// subdividing each sample interval into whole steps of size <= step.
TimeSeries rk4_on_grid(const ModelParams& p, double step, double t_max, int n_samples) {
  if (t_max <= 0.0 || n_samples < 2) {
    const TimeSeries one = rk4_autocorrelator(p, step, 0.0, 1);
    TimeSeries out = one;
    out.times = RVec::Zero(n_samples);
    out.values = CVec::Constant(n_samples, one.values[0]);
    return out;
  }
  const double dt = t_max / (n_samples - 1);
  const auto stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / step - 1e-9)));
  return rk4_autocorrelator(p, dt / static_cast<double>(stride), t_max, stride);
}

TimeSeries oracle_series(const RunConfig& cfg, const std::string& kind, double step,
                         const RVec& times) {
  if (kind == "ed") return EdOracle(cfg.model, cfg.basis).correlation(times);
  if (kind == "damping") return DampingOracle(cfg.model).correlation(times);
  return rk4_on_grid(cfg.model, step, cfg.dynamics.t_max, cfg.dynamics.n_samples);
}

void note_series(RunReport& report, const TimeSeries& ct) {
  report.note("captured_weight_re", ct.captured_weight.real());
  report.note("captured_weight_im", ct.captured_weight.imag());
  report.note("imag_ratio", ct.imag_ratio);
  report.note("coverage_warning", ct.coverage_warning);
}

const char* found_str(const RelaxationRate& rate, std::string& storage) {
  if (!rate.found) return "not found";
  storage = format_double(rate.delta);
  return storage.c_str();
}

int run_spectrum(const RunConfig& cfg) {
  return guarded("spectrum", cfg, [&](RunReport& report, const std::string& dir) {
    const SpectralMap map = compute_map(cfg);
    report.note_diagnostics(map.diag);
    const RelaxationRate rate = relaxation_from_map(map);
    report.note("delta_found", rate.found);
    if (rate.found) report.note("delta", rate.delta);
    report.emit(dir, "spectrum.csv", csv_from_map(map));
    if (cfg.output.svg) report.emit(dir, "spectrum.svg", svg_from_map(map));
    report.emit(dir, "relaxation.json", json_from_relaxation(rate, 1e-3));
    const std::string path = report.write(dir);
    std::string ds;
    std::printf("spectrum: %d x %d grid, %d nodes computed, delta %s\n", cfg.grid.n_re,
                cfg.grid.n_im, map.diag.nodes_computed, found_str(rate, ds));
    std::printf("report: %s\n", path.c_str());
    return 0;
  });
}

int run_dynamics(const RunConfig& cfg, const std::string& overlay, double step) {
  return guarded("dynamics", cfg, [&](RunReport& report, const std::string& dir) {
    const SpectralMap map = compute_map(cfg);
    report.note_diagnostics(map.diag);
    const RVec times = linspace(0.0, cfg.dynamics.t_max, cfg.dynamics.n_samples);
    const TimeSeries ct = autocorrelator(map, times);
    note_series(report, ct);
    report.emit(dir, "ct.csv", csv_from_series(ct));
    double deviation = -1.0;
    if (overlay != "none") {
      const TimeSeries ref = oracle_series(cfg, overlay, step, times);
      report.note("oracle", overlay);
      deviation = (ct.values - ref.values).cwiseAbs().maxCoeff();
      report.note("max_oracle_deviation", deviation);
      report.emit(dir, "ct_" + overlay + ".csv", csv_from_series(ref));
    }
    const std::string path = report.write(dir);
    std::printf("dynamics: %d samples to t = %g, captured weight %.6g\n",
                cfg.dynamics.n_samples, cfg.dynamics.t_max, ct.captured_weight.real());
    if (deviation >= 0.0)
      std::printf("overlay %s: max deviation %.3g\n", overlay.c_str(), deviation);
    std::printf("report: %s\n", path.c_str());
    return 0;
  });
}

int run_project(const RunConfig& cfg) {
  return guarded("project", cfg, [&](RunReport& report, const std::string& dir) {
    const RVec gammas = linspace(cfg.grid.re_min, cfg.grid.re_max, cfg.grid.n_re);
    const ProjectedCorrelator cp = compute_projection(cfg, gammas);
    report.note_diagnostics(cp.diag);
    report.note("imag_residual", cp.imag_residual);
    report.note("edge_fraction", cp.edge_fraction);
    report.note("coverage_warning", cp.coverage_warning);
    const RelaxationRate rate = relaxation_from_projection(cp);
    report.note("delta_found", rate.found);
    if (rate.found) report.note("delta", rate.delta);
    report.emit(dir, "cp.csv", csv_from_projection(cp));
    report.emit(dir, "relaxation.json", json_from_relaxation(rate, 1e-3));
    const std::string path = report.write(dir);
    std::string ds;
    std::printf("project: %d axis points, delta %s\n", static_cast<int>(cp.gammas.size()),
                found_str(rate, ds));
    std::printf("report: %s\n", path.c_str());
    return 0;
  });
}

int run_zeno_scan(const RunConfig& cfg) {
  if (!cfg.scan)
    throw ConfigError("zeno-scan needs a [scan] section in the run description");
  return guarded("zeno-scan", cfg, [&](RunReport& report, const std::string& dir) {
    const ScanConfig& scan = *cfg.scan;
    const RVec strengths = linspace(scan.gamma_min, scan.gamma_max, scan.n_points);
    const RVec axis = linspace(cfg.grid.re_min, cfg.grid.re_max, cfg.grid.n_re);
    std::string scan_csv = "gamma,gamma_axis,value\n";
    std::string rate_csv = "gamma,delta,found\n";
    double best_gamma = 0.0;
    double best_delta = -1.0;
    for (int i = 0; i < strengths.size(); ++i) {
      RunConfig local = cfg;
      local.model.gamma = strengths[i];
      const ProjectedCorrelator cp = compute_projection(local, axis);
      const RelaxationRate rate = relaxation_from_projection(cp);
      for (int k = 0; k < cp.gammas.size(); ++k) {
        scan_csv += format_double(strengths[i]);
        scan_csv += ',';
        scan_csv += format_double(cp.gammas[k]);
        scan_csv += ',';
        scan_csv += format_double(cp.values[k]);
        scan_csv += '\n';
      }
      rate_csv += format_double(strengths[i]);
      rate_csv += ',';
      rate_csv += format_double(rate.found ? rate.delta : 0.0);
      rate_csv += ',';
      rate_csv += rate.found ? '1' : '0';
      rate_csv += '\n';
      if (rate.found && rate.delta > best_delta) {
        best_delta = rate.delta;
        best_gamma = strengths[i];
      }
      std::string ds;
      std::printf("gamma %.6g: delta %s\n", strengths[i], found_str(rate, ds));
    }
    report.note("n_points", scan.n_points);
    if (best_delta >= 0.0) {
      report.note("gamma_c", best_gamma);
      report.note("delta_max", best_delta);
    }
    report.emit(dir, "cp_scan.csv", scan_csv);
    report.emit(dir, "delta_vs_gamma.csv", rate_csv);
    const std::string path = report.write(dir);
    if (best_delta >= 0.0)
      std::printf("zeno-scan: slowest relaxation is fastest at gamma = %.6g (delta %.6g)\n",
                  best_gamma, best_delta);
    else
      std::printf("zeno-scan: no relaxation rate found at any point\n");
    std::printf("report: %s\n", path.c_str());
    return 0;
  });
}

int run_oracle(const RunConfig& cfg, const std::string& kind, double step) {
  return guarded("oracle-" + kind, cfg, [&](RunReport& report, const std::string& dir) {
    const RVec times = linspace(0.0, cfg.dynamics.t_max, cfg.dynamics.n_samples);
    TimeSeries ct;
    RelaxationRate rate;
    bool have_rate = false;
    if (kind == "ed") {
      const EdOracle oracle(cfg.model, cfg.basis);
      ct = oracle.correlation(times);
      rate = oracle.relaxation_rate();
      have_rate = true;
      report.emit(dir, "modes.csv", csv_from_modes(oracle.spectrum(), oracle.weights().cwiseAbs()));
    } else if (kind == "damping") {
      const DampingOracle oracle(cfg.model);
      ct = oracle.correlation(times);
      rate = oracle.relaxation_rate();
      have_rate = true;
      report.emit(dir, "x_spectrum.csv", csv_from_modes(oracle.spectrum(), oracle.overlaps()));
    } else {
      ct = rk4_on_grid(cfg.model, step, cfg.dynamics.t_max, cfg.dynamics.n_samples);
      if (cfg.dynamics.t_max > 0.0 && cfg.dynamics.n_samples > 2)
        report.note("log_slope_tail", log_slope_tail(ct));
    }
    note_series(report, ct);
    report.emit(dir, "ct.csv", csv_from_series(ct));
    if (have_rate) {
      report.note("delta_found", rate.found);
      if (rate.found) report.note("delta", rate.delta);
      report.emit(dir, "relaxation.json", json_from_relaxation(rate, 1e-3));
    }
    const std::string path = report.write(dir);
    std::string ds;
    if (have_rate)
      std::printf("oracle %s: %d samples, delta %s\n", kind.c_str(), cfg.dynamics.n_samples,
                  found_str(rate, ds));
    else
      std::printf("oracle %s: %d samples to t = %g\n", kind.c_str(), cfg.dynamics.n_samples,
                  cfg.dynamics.t_max);
    std::printf("report: %s\n", path.c_str());
    return 0;
  });
}

// ---------------------------------------------------------------------------
// validate: structural self checks, each printed as one [PASS]/[FAIL] line.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Structure checks run on a shortened copy of the configured chain so the
// dense references stay cheap; the couplings themselves are kept.
ModelParams reduced_model(const ModelParams& p, int max_sites) {
  ModelParams out = p;
  out.n_sites = std::min(out.n_sites, max_sites);
  return out;
}

CheckResult check_kernel(double corruption) {
  const double residual = pv_inverse_quadrature_residual(64, 4096, corruption);
  return {"kernel-quadrature", residual < 1e-12,
          "residual " + format_double(residual) + " against tolerance 1e-12"};
}

CheckResult check_equivalence(const RunConfig& cfg) {
  ModelParams p = reduced_model(cfg.model, 2);
  const LindbladDense gen(p);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  double worst = 0.0;
  int trials = 0;
  for (const VectorBasis basis : {VectorBasis::Interleaved, VectorBasis::Stacked}) {
    const CMat lt = to_dense(vectorized_liouvillian(p, basis));
    for (int t = 0; t < 100; ++t, ++trials) {
      CMat rho(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho(i, j) = Cplx(dist(rng), dist(rng));
      const CVec lhs = lt * vectorize(rho, basis);
      const CVec rhs = vectorize(gen.apply(rho), basis);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / rho.norm());
    }
  }
  return {"vectorize-equivalence", worst < 1e-12,
          "max residual " + format_double(worst) + " over " + std::to_string(trials) +
              " random states in both layouts"};
}

CheckResult check_stationarity(const RunConfig& cfg) {
  const ModelParams p = reduced_model(cfg.model, 4);
  const auto dim = static_cast<double>(std::size_t{1} << p.n_sites);
  double worst = 0.0;
  for (const VectorBasis basis : {VectorBasis::Interleaved, VectorBasis::Stacked}) {
    const CMat lt = to_dense(vectorized_liouvillian(p, basis));
    const CMat id = CMat::Identity(static_cast<int>(dim), static_cast<int>(dim));
    const CVec mixed = vectorize(CMat(id / dim), basis);
    const CVec trace = vectorize(id, basis);
    worst = std::max(worst, (lt * mixed).cwiseAbs().maxCoeff());
    worst = std::max(worst, (lt.adjoint() * trace).cwiseAbs().maxCoeff());
  }
  return {"trace-stationarity", worst < 1e-12,
          "mixed state and trace functional annihilated within " + format_double(worst)};
}

CheckResult check_probes(const RunConfig& cfg) {
  const ModelParams p = reduced_model(cfg.model, 4);
  double worst = 0.0;
  for (const VectorBasis basis : {VectorBasis::Interleaved, VectorBasis::Stacked}) {
    const ProbePair pr = probe_vectors(p, basis);
    worst = std::max(worst, std::abs(pr.left.dot(pr.right) - 1.0));
  }
  const MpsProbePair mp = mps_probe_vectors(p);
  worst = std::max(worst, std::abs(inner(mp.left, mp.right) - 1.0));
  return {"probe-normalization", worst < 1e-12,
          "largest overlap deviation " + format_double(worst)};
}

CheckResult check_conjugation(const RunConfig& cfg) {
  const ModelParams p = reduced_model(cfg.model, 4);
  FrequencyGrid grid{-1.1, -0.1, 5, -1.0, 1.0, 9};
  KpmParams kpm;
  kpm.n_moments = 128;
  kpm.use_mirror = false;
  const PauliTerms lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const ProbePair pr = probe_vectors(p, VectorBasis::Interleaved);
  const SpectralMap map = spectral_map_dense(lt, pr.left, pr.right, grid, kpm, cfg.workers);
  const double residual = map.diag.symmetry_residual;
  return {"map-conjugation", residual >= 0.0 && residual < 1e-6,
          "mirror row residual " + format_double(residual) + " against tolerance 1e-6"};
}

CheckResult check_even_moments(const RunConfig& cfg) {
  const ModelParams p = reduced_model(cfg.model, 4);
  const PauliTerms lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const ProbePair pr = probe_vectors(p, VectorBasis::Interleaved);
  const Cplx omega(-0.3, 0.4);
  FrequencyGrid around{-0.5, -0.1, 3, -0.5, 0.5, 3};
  KpmParams kpm;
  kpm.n_moments = 64;
  kpm.scale = estimate_scale(lt, around);
  const CVec mu = chebyshev_moments_dense(PauliApplier(lt), omega, pr.left, pr.right, kpm);
  double even_max = 0.0;
  double odd_max = 0.0;
  for (int m = 0; m < mu.size(); ++m) {
    if (m % 2 == 0)
      even_max = std::max(even_max, std::abs(mu[m]));
    else
      odd_max = std::max(odd_max, std::abs(mu[m]));
  }
  return {"even-moments", even_max < 1e-10 && odd_max > 0.0,
          "largest even moment " + format_double(even_max) + ", largest odd " +
              format_double(odd_max)};
}

CheckResult check_ed_vs_rk4(const RunConfig& cfg) {
  const ModelParams p = reduced_model(cfg.model, 4);
  const int n_samples = 9;
  const double t_max = 2.0;
  const TimeSeries march = rk4_on_grid(p, 1e-3, t_max, n_samples);
  const TimeSeries exact = EdOracle(p, cfg.basis).correlation(linspace(0.0, t_max, n_samples));
  const double deviation = (march.values - exact.values).cwiseAbs().maxCoeff();
  return {"ed-vs-rk4", deviation < 1e-6,
          "max deviation " + format_double(deviation) + " on [0, 2]"};
}

CheckResult check_ed_vs_damping(const RunConfig& cfg) {
  ModelParams p = reduced_model(cfg.model, 4);
  p.jz = 0.0;  // the damping matrix covers the quadratic sector only
  const RVec times = linspace(0.0, 2.0, 9);
  const TimeSeries a = EdOracle(p, cfg.basis).correlation(times);
  const TimeSeries b = DampingOracle(p).correlation(times);
  const double deviation = (a.values - b.values).cwiseAbs().maxCoeff();
  return {"ed-vs-damping", deviation < 1e-6,
          "max deviation " + format_double(deviation) + " on [0, 2]"};
}

int run_validate(const RunConfig& cfg, bool corrupt_kernel) {
  return guarded("validate", cfg, [&](RunReport& report, const std::string& dir) {
    report.note("corrupt_kernel", corrupt_kernel);
    std::vector<CheckResult> results;
    results.push_back(check_kernel(corrupt_kernel ? 1e-3 : 0.0));
    results.push_back(check_equivalence(cfg));
    results.push_back(check_stationarity(cfg));
    results.push_back(check_probes(cfg));
    results.push_back(check_conjugation(cfg));
    results.push_back(check_even_moments(cfg));
    results.push_back(check_ed_vs_rk4(cfg));
    results.push_back(check_ed_vs_damping(cfg));
    int passed = 0;
    for (const CheckResult& r : results) {
      std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
      report.note("check_" + r.name, r.pass);
      if (r.pass) ++passed;
    }
    const int total = static_cast<int>(results.size());
    report.note("checks_passed", passed);
    const std::string path = report.write(dir);
    std::printf("validate: %d/%d checks passed\n", passed, total);
    std::printf("report: %s\n", path.c_str());
    return passed == total ? 0 : 1;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "liouv: spectra and dynamics of dissipative spin chains via the kernel "
      "polynomial method.  LIOUV_OUTPUT_DIR overrides the output directory."};
  app.require_subcommand(1);

  CliOptions cli;
  const auto add_common = [&cli](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "run description file");
    sub->add_option("--backend", cli.backend, "dense | mps")
        ->check(CLI::IsMember({"dense", "mps"}));
    sub->add_option("--workers", cli.workers, "threads across grid nodes")
        ->check(CLI::PositiveNumber);
    sub->add_option("--refine", cli.refine,
                    "re_min,re_max,im_min,im_max window replacing the grid bounds")
        ->delimiter(',')
        ->expected(4);
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "map C(w) over the frequency grid");
  add_common(spectrum);
  spectrum->add_flag("--svg", cli.svg, "also write a heat map image");

  std::string overlay = "none";
  double step = 1e-3;
  CLI::App* dynamics =
      app.add_subcommand("dynamics", "autocorrelator C(t) integrated from the map");
  add_common(dynamics);
  dynamics->add_option("--oracle", overlay, "overlay an exact series: ed | rk4 | damping")
      ->check(CLI::IsMember({"none", "ed", "rk4", "damping"}));
  dynamics->add_option("--step", step, "integrator step for the rk4 overlay")
      ->check(CLI::PositiveNumber);

  CLI::App* project =
      app.add_subcommand("project", "integrate the map along the imaginary axis");
  add_common(project);

  CLI::App* zeno = app.add_subcommand(
      "zeno-scan", "projection and relaxation rate for each dissipation strength");
  add_common(zeno);

  std::string kind;
  CLI::App* oracle =
      app.add_subcommand("oracle", "exact reference series from a closed form method");
  add_common(oracle);
  oracle->add_option("kind", kind, "ed | rk4 | damping")
      ->required()
      ->check(CLI::IsMember({"ed", "rk4", "damping"}));
  oracle->add_option("--step", step, "integrator step for the rk4 march")
      ->check(CLI::PositiveNumber);

  bool corrupt_kernel = false;
  CLI::App* validate = app.add_subcommand("validate", "run the structural self checks");
  add_common(validate);
  validate->add_flag("--corrupt-kernel", corrupt_kernel)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const lkpm::RunConfig cfg = resolve_config(cli);
    if (spectrum->parsed()) return run_spectrum(cfg);
    if (dynamics->parsed()) return run_dynamics(cfg, overlay, step);
    if (project->parsed()) return run_project(cfg);
    if (zeno->parsed()) return run_zeno_scan(cfg);
    if (oracle->parsed()) return run_oracle(cfg, kind, step);
    return run_validate(cfg, corrupt_kernel);
  } catch (const lkpm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const lkpm::ResourceError& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return 3;
  } catch (const lkpm::InvariantError& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
