#include "lkpm/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lkpm {

namespace {

double grid_cell(const FrequencyGrid& g) { return g.re_step() * g.im_step(); }

// vertex of the parabola through (-1, fm), (0, f0), (+1, fp), clamped to the
// central cell so a flat or ascending triple cannot throw the result far off
double parabola_shift(double fm, double f0, double fp) {
  const double denom = fm - 2.0 * f0 + fp;
  if (denom >= 0.0) return 0.0;  // not a strict local max in this direction
  double s = 0.5 * (fm - fp) / denom;
  return std::clamp(s, -0.5, 0.5);
}

}  // namespace

TimeSeries autocorrelator(const SpectralMap& map, const RVec& times, double expected_weight) {
  map.grid.validate();
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] <= times[k - 1]))
      throw ConfigError("autocorrelator: times must be nonnegative and strictly increasing");
  }

  TimeSeries ts;
  ts.times = times;
  ts.values = CVec::Zero(times.size());
  const double cell = grid_cell(map.grid);

  Cplx weight = 0.0;
  for (int j = 0; j < map.grid.n_im; ++j)
    for (int i = 0; i < map.grid.n_re; ++i) {
      if (!map.valid(j, i)) continue;
      const Cplx c = map.corr(j, i) * cell;
      weight += c;
      const Cplx w = map.grid.node(i, j);
      for (Eigen::Index k = 0; k < times.size(); ++k)
        ts.values[k] += c * std::exp(w * times[k]);
    }
  ts.captured_weight = weight;

  double top = 0.0, imag_top = 0.0;
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    top = std::max(top, std::abs(ts.values[k]));
    imag_top = std::max(imag_top, std::abs(ts.values[k].imag()));
  }
  ts.imag_ratio = (top > 0.0) ? imag_top / top : 0.0;

  if (!std::isnan(expected_weight)) {
    const double tol = 0.03 * std::max(1.0, std::abs(expected_weight));
    ts.coverage_warning = std::abs(weight - Cplx(expected_weight)) > tol;
  }
  return ts;
}

ProjectedCorrelator projected_from_map(const SpectralMap& map) {
  map.grid.validate();
  ProjectedCorrelator cp;
  cp.diag = map.diag;
  const int n_cols = map.grid.n_re - 2;
  cp.gammas.resize(n_cols);
  cp.values.resize(n_cols);
  const double dim_w = map.grid.im_step();

  double imag_top = 0.0;
  for (int c = 0; c < n_cols; ++c) {
    const int i = c + 1;
    cp.gammas[c] = map.grid.node(i, 0).real();
    Cplx sum = 0.0;
    for (int j = 1; j + 1 < map.grid.n_im; ++j) {
      if (!map.valid(j, i)) continue;
      sum += map.corr(j, i) * dim_w;
    }
    cp.values[c] = sum.real();
    imag_top = std::max(imag_top, std::abs(sum.imag()));
  }
  const double top = std::max(cp.values.cwiseAbs().maxCoeff(), 1e-300);
  cp.imag_residual = imag_top / top;

  // weight still present on the outermost interior rows signals that the
  // vertical window clips the spectrum
  const double map_top = std::max(map.corr.cwiseAbs().maxCoeff(), 1e-300);
  double edge = 0.0;
  for (int i = 1; i + 1 < map.grid.n_re; ++i) {
    edge = std::max(edge, std::abs(map.corr(1, i)));
    edge = std::max(edge, std::abs(map.corr(map.grid.n_im - 2, i)));
  }
  cp.edge_fraction = edge / map_top;
  cp.coverage_warning = cp.edge_fraction > 0.01;
  return cp;
}

namespace {

FrequencyGrid padded_gamma_grid(const RVec& gammas, double im_min, double im_max, int n_im) {
  if (gammas.size() < 1) throw ConfigError("projected_correlator: need at least one gamma");
  double h;
  if (gammas.size() == 1) {
    if (n_im < 2) throw ConfigError("projected_correlator: n_im too small");
    h = (im_max - im_min) / (n_im - 1);
  } else {
    h = gammas[1] - gammas[0];
    if (h <= 0.0) throw ConfigError("projected_correlator: gammas must be increasing");
    for (Eigen::Index k = 1; k < gammas.size(); ++k)
      if (std::abs((gammas[k] - gammas[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
        throw ConfigError("projected_correlator: gammas must be uniformly spaced");
  }
  FrequencyGrid grid;
  grid.re_min = gammas[0] - h;
  grid.re_max = gammas[gammas.size() - 1] + h;
  grid.n_re = static_cast<int>(gammas.size()) + 2;
  grid.im_min = im_min;
  grid.im_max = im_max;
  grid.n_im = n_im;
  return grid;
}

}  // namespace

ProjectedCorrelator projected_correlator_dense(const PauliTerms& ops, const CVec& left,
                                               const CVec& right, const RVec& gammas,
                                               double im_min, double im_max, int n_im,
                                               const KpmParams& kpm, int n_workers) {
  const FrequencyGrid grid = padded_gamma_grid(gammas, im_min, im_max, n_im);
  return projected_from_map(spectral_map_dense(ops, left, right, grid, kpm, n_workers));
}

ProjectedCorrelator projected_correlator_mps(const PauliTerms& ops, const Mps& left,
                                             const Mps& right, const RVec& gammas, double im_min,
                                             double im_max, int n_im, const KpmParams& kpm,
                                             const MpsOptions& opt, int n_workers) {
  const FrequencyGrid grid = padded_gamma_grid(gammas, im_min, im_max, n_im);
  return projected_from_map(spectral_map_mps(ops, left, right, grid, kpm, opt, n_workers));
}

RelaxationRate relaxation_from_map(const SpectralMap& map, double height_cut) {
  map.grid.validate();
  RelaxationRate r;
  const double top = map.corr.cwiseAbs().maxCoeff();
  if (top <= 0.0) return r;
  const double cell = std::max(map.grid.re_step(), map.grid.im_step());

  for (int j = 1; j + 1 < map.grid.n_im; ++j)
    for (int i = 1; i + 1 < map.grid.n_re; ++i) {
      if (!map.valid(j, i)) continue;
      const double h0 = std::abs(map.corr(j, i));
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj)
        for (int di = -1; di <= 1 && is_max; ++di) {
          if (di == 0 && dj == 0) continue;
          if (!map.valid(j + dj, i + di) || std::abs(map.corr(j + dj, i + di)) > h0)
            is_max = false;
        }
      if (!is_max) continue;

      const double sx = parabola_shift(std::abs(map.corr(j, i - 1)), h0,
                                       std::abs(map.corr(j, i + 1)));
      const double sy = parabola_shift(std::abs(map.corr(j - 1, i)), h0,
                                       std::abs(map.corr(j + 1, i)));
      const Cplx pos = map.grid.node(i, j) +
                       Cplx(sx * map.grid.re_step(), sy * map.grid.im_step());
      r.peaks.push_back({pos, h0});
    }

  // exact-tie plateaus (mirror-filled rows) produce twin detections; keep one
  std::sort(r.peaks.begin(), r.peaks.end(),
            [](const PeakInfo& a, const PeakInfo& b) { return a.height > b.height; });
  std::vector<PeakInfo> unique;
  for (const auto& p : r.peaks) {
    bool dup = false;
    for (const auto& q : unique)
      if (std::abs(p.position - q.position) < 0.6 * cell) dup = true;
    if (!dup) unique.push_back(p);
  }
  r.peaks = std::move(unique);
  std::sort(r.peaks.begin(), r.peaks.end(), [](const PeakInfo& a, const PeakInfo& b) {
    return std::abs(a.position.real()) < std::abs(b.position.real());
  });

  for (const auto& p : r.peaks) {
    if (p.height < height_cut * top) continue;
    if (std::abs(p.position) < 0.75 * cell) continue;  // steady-state pole
    r.found = true;
    r.delta = std::abs(p.position.real());
    break;
  }
  return r;
}

RelaxationRate relaxation_from_projection(const ProjectedCorrelator& cp, double height_cut) {
  RelaxationRate r;
  const Eigen::Index n = cp.values.size();
  if (n < 3) return r;
  const double top = cp.values.cwiseAbs().maxCoeff();
  if (top <= 0.0) return r;
  const double spacing = cp.gammas[1] - cp.gammas[0];

  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const double h0 = cp.values[k];
    if (h0 < cp.values[k - 1] || h0 < cp.values[k + 1]) continue;
    const double s = parabola_shift(cp.values[k - 1], h0, cp.values[k + 1]);
    r.peaks.push_back({Cplx(cp.gammas[k] + s * spacing, 0.0), h0});
  }
  std::sort(r.peaks.begin(), r.peaks.end(), [](const PeakInfo& a, const PeakInfo& b) {
    return std::abs(a.position.real()) < std::abs(b.position.real());
  });
  for (const auto& p : r.peaks) {
    if (p.height < height_cut * top) continue;
    if (std::abs(p.position.real()) < 0.75 * std::abs(spacing)) continue;
    r.found = true;
    r.delta = std::abs(p.position.real());
    break;
  }
  return r;
}

double log_slope_tail(const TimeSeries& ts) {
  const Eigen::Index n = ts.times.size();
  if (n < 3) throw ConfigError("log_slope_tail: need at least three samples");
  const double t_max = ts.times[n - 1];
  const double t_start = t_max / 10.0;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (ts.times[k] < t_start) continue;
    const double a = std::abs(ts.values[k]);
    if (a <= 0.0) continue;
    const double x = ts.times[k];
    const double y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw ConfigError("log_slope_tail: too few usable samples in the final decade");
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("log_slope_tail: degenerate time samples");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace lkpm
