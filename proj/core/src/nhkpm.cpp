#include "lkpm/nhkpm.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

namespace lkpm {

void KpmParams::validate() const {
  if (n_moments < 16)
    throw ConfigError("kpm: n_moments must be at least 16, got " + std::to_string(n_moments));
  if (scale < 0.0) throw ConfigError("kpm: scale must be nonnegative (0 = auto)");
}

void FrequencyGrid::validate() const {
  if (n_re < 3 || n_im < 3)
    throw ConfigError("grid: need at least 3 nodes per axis for central differences, got " +
                      std::to_string(n_re) + " x " + std::to_string(n_im));
  if (!(re_max > re_min) || !(im_max > im_min))
    throw ConfigError("grid: bounds must be strictly increasing");
}

bool FrequencyGrid::imag_symmetric() const {
  return std::abs(im_min + im_max) <= 1e-12 * std::max(1.0, im_max - im_min);
}

RVec jackson_coefficients(int n_moments) {
  if (n_moments < 1) throw ConfigError("jackson_coefficients: need at least one moment");
  const double mp1 = n_moments + 1.0;
  const double cot = std::cos(kPi / mp1) / std::sin(kPi / mp1);
  RVec g(n_moments);
  for (int m = 0; m < n_moments; ++m) {
    const double x = kPi * m / mp1;
    g[m] = ((n_moments - m + 1.0) * std::cos(x) + std::sin(x) * cot) / mp1;
  }
  return g;
}

double pv_inverse_coefficient(int m) {
  if (m < 1 || m % 2 == 0) return 0.0;
  return (((m - 1) / 2) % 2 == 0) ? 2.0 : -2.0;
}

double pv_inverse_quadrature_residual(int n_check, int n_nodes, double corruption) {
  if (n_check < 2 || n_nodes < n_check)
    throw ConfigError("pv_inverse_quadrature_residual: need n_nodes >= n_check >= 2");
  // Chebyshev-Gauss quadrature of (2/pi) PV int T_m(x)/x / sqrt(1-x^2) dx.
  // For odd m the integrand is a polynomial of degree m-1, so the rule is
  // exact up to rounding; long double accumulation keeps that visible.
  std::vector<long double> sums(n_check, 0.0L);
  for (int k = 0; k < n_nodes; ++k) {
    const long double x = std::cos(kPi * (k + 0.5L) / n_nodes);
    long double t_prev = 1.0L, t_cur = x;
    for (int m = 1; m < n_check; ++m) {
      sums[m] += t_cur / x;
      const long double t_next = 2.0L * x * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_next;
    }
  }
  double residual = 0.0;
  for (int m = 1; m < n_check; m += 2) {
    const double quad = static_cast<double>(2.0L * sums[m] / n_nodes);
    const double closed = pv_inverse_coefficient(m) + corruption;
    residual = std::max(residual, std::abs(closed - quad));
  }
  return residual;
}

namespace {

void ensure_pv_expansion_verified() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    const double residual = pv_inverse_quadrature_residual(64, 4096);
    if (residual > 1e-12)
      throw InvariantError(
          "inverse-expansion self-check failed: closed-form coefficients deviate from "
          "quadrature by " +
          std::to_string(residual));
  });
}

}  // namespace

double estimate_scale(const PauliTerms& ops, const FrequencyGrid& grid) {
  grid.validate();
  double corner = 0.0;
  for (double re : {grid.re_min, grid.re_max})
    for (double im : {grid.im_min, grid.im_max})
      corner = std::max(corner, std::abs(Cplx(re, im)));
  return 1.1 * (corner + coeff_l1_norm(ops) + std::abs(ops.shift));
}

BlockVec hermitrized_apply(const PauliApplier& op, Cplx omega, const BlockVec& v) {
  BlockVec out;
  op.apply_shifted(omega, false, v.lower, out.upper);
  op.apply_shifted(omega, true, v.upper, out.lower);
  return out;
}

namespace {

[[noreturn]] void throw_scale_violation(double scale, double growth, int step) {
  const double suggested = 1.1 * scale * std::pow(growth, 1.0 / step);
  throw InvariantError("kpm: iterate norm grew " + std::to_string(growth) +
                       "-fold by moment " + std::to_string(step) +
                       ", so the scale " + std::to_string(scale) +
                       " is below the spectral radius; retry with scale >= " +
                       std::to_string(suggested));
}

}  // namespace

CVec chebyshev_moments_dense(const PauliApplier& op, Cplx omega, const CVec& left,
                             const CVec& right, const KpmParams& kpm) {
  kpm.validate();
  if (kpm.scale <= 0.0)
    throw ConfigError("chebyshev_moments: scale must be resolved to a positive value");
  const auto n = static_cast<Eigen::Index>(op.dim());
  if (left.size() != n || right.size() != n)
    throw InvariantError("chebyshev_moments: boundary vector dimension mismatch");

  const int n_mom = kpm.n_moments;
  CVec mu = CVec::Zero(n_mom);
  const double rnorm = right.norm();
  if (rnorm == 0.0) return mu;
  const double guard = 10.0 * rnorm;
  const double a = kpm.scale;

  // iterates of the doubled operator keep a single nonzero block that
  // alternates with the Chebyshev index; p holds even steps, q odd ones
  CVec p = right;
  CVec q = CVec::Zero(n);
  op.cheb_step(omega, true, 1.0 / a, p, q);
  mu[1] = left.dot(q);
  for (int m = 3; m < n_mom; m += 2) {
    op.cheb_step(omega, false, 2.0 / a, q, p);
    op.cheb_step(omega, true, 2.0 / a, p, q);
    mu[m] = left.dot(q);
    if (((m >> 1) & 15) == 0) {
      const double qn = q.norm();
      if (qn > guard) throw_scale_violation(a, qn / rnorm, m);
    }
  }
  return mu;
}

MpsMoments chebyshev_moments_mps(const PauliTerms& ops, Cplx omega, const Mps& left,
                                 const Mps& right, const KpmParams& kpm, const MpsOptions& opt,
                                 std::vector<BondLogEntry>* bond_log) {
  kpm.validate();
  if (kpm.scale <= 0.0)
    throw ConfigError("chebyshev_moments: scale must be resolved to a positive value");
  const Mpo fwd = mpo_shifted(ops, omega, false);
  const Mpo rev = mpo_shifted(ops, omega, true);

  const int n_mom = kpm.n_moments;
  MpsMoments out;
  out.mu = CVec::Zero(n_mom);
  const double rnorm = right.norm();
  if (rnorm == 0.0) return out;
  const double guard = 10.0 * rnorm;
  const double a = kpm.scale;

  auto log_bonds = [&](const Mps& m, int step) {
    if (!bond_log) return;
    for (int i = 0; i + 1 < m.n_sites(); ++i) bond_log->push_back({step, i, m.bond(i)});
  };
  // x <- (2/a) op x_other - x
  auto recurse = [&](Mps& x, const Mps& other, const Mpo& mpo) {
    auto t = apply_mpo_zipup(mpo, other, opt);
    t.out.prefactor *= 2.0 / a;
    x.prefactor = -x.prefactor;
    Mps s = add(t.out, x);
    const auto cs = compress(s, opt);
    out.trunc_error += t.trunc_error * (2.0 / a) + cs.trunc_error;
    out.max_bond = std::max(out.max_bond, cs.max_bond);
    x = std::move(s);
  };

  Mps p = right;
  auto first = apply_mpo_zipup(rev, p, opt);
  Mps q = std::move(first.out);
  q.prefactor /= a;
  out.trunc_error += first.trunc_error / a;
  out.max_bond = std::max(out.max_bond, first.max_bond);
  out.mu[1] = inner(left, q);
  log_bonds(q, 1);

  for (int m = 3; m < n_mom; m += 2) {
    recurse(p, q, fwd);
    recurse(q, p, rev);
    out.mu[m] = inner(left, q);
    log_bonds(q, m);
    if (((m >> 1) & 7) == 0) {
      const double qn = q.norm();
      if (qn > guard) throw_scale_violation(a, qn / rnorm, m);
    }
  }
  return out;
}

Cplx greens_from_moments(const CVec& mu, double scale) {
  ensure_pv_expansion_verified();
  if (scale <= 0.0) throw ConfigError("greens_from_moments: scale must be positive");
  const int n_mom = static_cast<int>(mu.size());
  const RVec g = jackson_coefficients(n_mom);
  Cplx sum = 0.0;
  for (int m = 1; m < n_mom; m += 2) sum += pv_inverse_coefficient(m) * g[m] * mu[m];
  return sum / scale;
}

namespace {

struct NodeResult {
  Cplx greens;
  double trunc_error = 0.0;
  int max_bond = 0;
};

SpectralMap run_map(const FrequencyGrid& grid, const KpmParams& kpm, double scale,
                    const std::function<NodeResult(Cplx)>& eval, int n_workers) {
  grid.validate();
  SpectralMap map;
  map.grid = grid;
  map.greens = CMat::Zero(grid.n_im, grid.n_re);
  map.corr = CMat::Zero(grid.n_im, grid.n_re);
  map.valid.setZero(grid.n_im, grid.n_re);
  map.diag.scale = scale;
  map.diag.n_moments = kpm.n_moments;

  const bool mirror = kpm.use_mirror && grid.imag_symmetric();
  const int j_top = mirror ? (grid.n_im - 1) / 2 : grid.n_im - 1;
  std::vector<std::pair<int, int>> jobs;  // (im row, re column)
  jobs.reserve(static_cast<std::size_t>(j_top + 1) * grid.n_re);
  for (int j = 0; j <= j_top; ++j)
    for (int i = 0; i < grid.n_re; ++i) jobs.emplace_back(j, i);

  std::atomic<std::size_t> cursor{0};
  std::mutex diag_mutex;
  std::exception_ptr failure;
  auto drain = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= jobs.size()) return;
      const auto [j, i] = jobs[k];
      try {
        const NodeResult r = eval(grid.node(i, j));
        map.greens(j, i) = r.greens;  // slot per job, no write overlap
        if (r.trunc_error > 0.0 || r.max_bond > 0) {
          const std::lock_guard<std::mutex> lk(diag_mutex);
          map.diag.max_trunc_error = std::max(map.diag.max_trunc_error, r.trunc_error);
          map.diag.max_bond = std::max(map.diag.max_bond, r.max_bond);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lk(diag_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(n_workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  map.diag.nodes_computed = static_cast<int>(jobs.size());

  if (mirror) {
    for (int j = j_top + 1; j < grid.n_im; ++j)
      map.greens.row(j) = map.greens.row(grid.n_im - 1 - j).conjugate();
  }
  if (!map.greens.allFinite())
    throw InvariantError("spectral map produced non-finite resolvent values");

  if (grid.imag_symmetric() && !mirror) {
    const double den = std::max(map.greens.cwiseAbs().maxCoeff(), 1e-300);
    double num = 0.0;
    for (int j = 0; j < grid.n_im; ++j)
      for (int i = 0; i < grid.n_re; ++i)
        num = std::max(num, std::abs(map.greens(grid.n_im - 1 - j, i) -
                                     std::conj(map.greens(j, i))));
    map.diag.symmetry_residual = num / den;
  }

  const double hx = grid.re_step();
  const double hy = grid.im_step();
  for (int j = 1; j + 1 < grid.n_im; ++j)
    for (int i = 1; i + 1 < grid.n_re; ++i) {
      const Cplx dx = (map.greens(j, i + 1) - map.greens(j, i - 1)) / (2.0 * hx);
      const Cplx dy = (map.greens(j + 1, i) - map.greens(j - 1, i)) / (2.0 * hy);
      map.corr(j, i) = (dx + Cplx(0.0, 1.0) * dy) / (2.0 * kPi);
      map.valid(j, i) = 1;
    }
  return map;
}

}  // namespace

SpectralMap spectral_map_dense(const PauliTerms& ops, const CVec& left, const CVec& right,
                               const FrequencyGrid& grid, const KpmParams& kpm, int n_workers) {
  kpm.validate();
  KpmParams resolved = kpm;
  if (resolved.scale == 0.0) resolved.scale = estimate_scale(ops, grid);
  const PauliApplier op(ops);
  auto eval = [&](Cplx omega) {
    const CVec mu = chebyshev_moments_dense(op, omega, left, right, resolved);
    return NodeResult{greens_from_moments(mu, resolved.scale), 0.0, 0};
  };
  return run_map(grid, resolved, resolved.scale, eval, n_workers);
}

SpectralMap spectral_map_mps(const PauliTerms& ops, const Mps& left, const Mps& right,
                             const FrequencyGrid& grid, const KpmParams& kpm,
                             const MpsOptions& opt, int n_workers) {
  kpm.validate();
  KpmParams resolved = kpm;
  if (resolved.scale == 0.0) resolved.scale = estimate_scale(ops, grid);
  auto eval = [&](Cplx omega) {
    const MpsMoments mm = chebyshev_moments_mps(ops, omega, left, right, resolved, opt);
    return NodeResult{greens_from_moments(mm.mu, resolved.scale), mm.trunc_error, mm.max_bond};
  };
  return run_map(grid, resolved, resolved.scale, eval, n_workers);
}

}  // namespace lkpm
