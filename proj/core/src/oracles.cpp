#include "lkpm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "lkpm/linalg.hpp"

namespace lkpm {

namespace {

void check_times(const RVec& times) {
  if (times.size() == 0) {
    throw ConfigError("oracle time grid is empty");
  }
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) {
      throw ConfigError("oracle times must be nonnegative and finite");
    }
    if (k > 0 && times[k] < times[k - 1]) {
      throw ConfigError("oracle times must be nondecreasing");
    }
  }
}

TimeSeries series_from_modes(const CVec& values, const CVec& weights,
                             const RVec& times) {
  check_times(times);
  TimeSeries out;
  out.times = times;
  out.values = CVec::Zero(times.size());
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    Cplx acc = 0.0;
    for (Eigen::Index n = 0; n < values.size(); ++n) {
      acc += weights[n] * std::exp(values[n] * times[k]);
    }
    out.values[k] = acc;
  }
  out.captured_weight = weights.sum();
  const double top =
      out.values.size() > 0 ? out.values.cwiseAbs().maxCoeff() : 0.0;
  out.imag_ratio =
      top > 0.0 ? out.values.imag().cwiseAbs().maxCoeff() / top : 0.0;
  out.coverage_warning = std::abs(out.captured_weight - 1.0) > 0.03;
  return out;
}

}  // namespace

RelaxationRate relaxation_from_modes(const CVec& values, const CVec& weights,
                                     double weight_cut) {
  if (values.size() != weights.size()) {
    throw ConfigError("mode values and weights differ in length");
  }
  RelaxationRate out;
  if (values.size() == 0) {
    return out;
  }
  const double top = weights.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) {
    return out;
  }
  const double zero_tol = 1e-8 * std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    const double height = std::abs(weights[n]);
    if (height >= weight_cut * top) {
      out.peaks.push_back({values[n], height});
    }
  }
  std::stable_sort(out.peaks.begin(), out.peaks.end(),
                   [](const PeakInfo& a, const PeakInfo& b) {
                     const double ra = std::abs(a.position.real());
                     const double rb = std::abs(b.position.real());
                     if (ra != rb) return ra < rb;
                     return a.height > b.height;
                   });
  for (const PeakInfo& peak : out.peaks) {
    if (std::abs(peak.position) > zero_tol) {
      out.found = true;
      out.delta = std::abs(peak.position.real());
      break;
    }
  }
  return out;
}

EdOracle::EdOracle(const ModelParams& params, VectorBasis basis)
    : params_(params) {
  if (params.n_sites > 5) {
    throw ResourceError("exact diagonalization of the generator supports at "
                        "most 5 sites; got " +
                        std::to_string(params.n_sites));
  }
  params.validate();
  const PauliTerms generator = vectorized_liouvillian(params, basis);
  const EigenDecomposition eig = eig_nonhermitian(to_dense(generator));
  const ProbePair probes = probe_vectors(params, basis);
  values_ = eig.values;
  // C(t) = sum_n (psiL^dag v_n) exp(v_n t) (w_n^dag psiR) in the
  // biorthogonal pair convention of the decomposition.
  const CVec outgoing = eig.right.transpose() * probes.left.conjugate();
  const CVec incoming = eig.left.adjoint() * probes.right;
  weights_ = outgoing.cwiseProduct(incoming);
}

TimeSeries EdOracle::correlation(const RVec& times) const {
  return series_from_modes(values_, weights_, times);
}

RelaxationRate EdOracle::relaxation_rate(double weight_cut) const {
  return relaxation_from_modes(values_, weights_, weight_cut);
}

TimeSeries rk4_autocorrelator(const ModelParams& params, double step,
                              double t_max, std::size_t sample_stride) {
  if (params.n_sites > 7) {
    throw ResourceError("rk4 oracle supports at most 7 sites; got " +
                        std::to_string(params.n_sites));
  }
  params.validate();
  if (!(step > 0.0)) {
    throw ConfigError("rk4 step must be positive");
  }
  if (!(t_max >= 0.0)) {
    throw ConfigError("rk4 horizon must be nonnegative");
  }
  if (sample_stride == 0) {
    throw ConfigError("rk4 sample stride must be positive");
  }

  const LindbladDense rhs(params);
  const std::size_t dim = std::size_t{1} << params.n_sites;
  const std::uint64_t probe_bit = std::uint64_t{1}
                                  << (params.n_sites - 1);
  auto edge_z = [probe_bit](std::size_t s) {
    return (s & probe_bit) != 0 ? -1.0 : 1.0;
  };

  // y(0) = Z_N rho_ss is diagonal in the z basis.
  CMat y = CMat::Zero(dim, dim);
  for (std::size_t s = 0; s < dim; ++s) {
    y(s, s) = edge_z(s) / static_cast<double>(dim);
  }
  const double norm_0 = y.norm();

  auto correlate = [&](const CMat& m) {
    Cplx acc = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
      acc += edge_z(s) * m(s, s);
    }
    return acc;
  };

  const long long n_steps =
      t_max > 0.0
          ? static_cast<long long>(std::ceil(t_max / step - 1e-9))
          : 0;

  std::vector<double> times;
  std::vector<Cplx> samples;
  CMat k1, k2, k3, k4, stage;
  for (long long k = 0; k <= n_steps; ++k) {
    const bool emit =
        (k % static_cast<long long>(sample_stride) == 0) || k == n_steps;
    if (emit) {
      const double trace_drift = std::abs(y.trace());
      const double herm_drift = (y - y.adjoint()).cwiseAbs().maxCoeff();
      if (trace_drift > 1e-9 || herm_drift > 1e-9) {
        std::ostringstream msg;
        msg << "rk4 state degraded at t = " << k * step
            << " (trace drift " << trace_drift << ", hermiticity drift "
            << herm_drift << ")";
        throw InvariantError(msg.str());
      }
      times.push_back(static_cast<double>(k) * step);
      samples.push_back(correlate(y));
    }
    if (k == n_steps) {
      break;
    }
    rhs.apply(y, k1);
    stage = y + (0.5 * step) * k1;
    rhs.apply(stage, k2);
    stage = y + (0.5 * step) * k2;
    rhs.apply(stage, k3);
    stage = y + step * k3;
    rhs.apply(stage, k4);
    y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(y.norm() <= 1e3 * std::max(norm_0, 1e-300))) {
      std::ostringstream msg;
      msg << "rk4 step " << step << " is unstable for this model; retry "
          << "with step <= " << step / 4;
      throw InvariantError(msg.str());
    }
  }

  TimeSeries out;
  out.times = Eigen::Map<const RVec>(times.data(),
                                     static_cast<Eigen::Index>(times.size()));
  out.values = Eigen::Map<const CVec>(
      samples.data(), static_cast<Eigen::Index>(samples.size()));
  out.captured_weight = out.values[0];
  const double top = out.values.cwiseAbs().maxCoeff();
  out.imag_ratio =
      top > 0.0 ? out.values.imag().cwiseAbs().maxCoeff() / top : 0.0;
  out.coverage_warning = std::abs(out.captured_weight - 1.0) > 0.03;
  return out;
}

DampingOracle::DampingOracle(const ModelParams& params) : params_(params) {
  if (params.n_sites > 64) {
    throw ResourceError("damping-matrix oracle supports at most 64 sites; "
                        "got " +
                        std::to_string(params.n_sites));
  }
  params.validate();
  if (params.jz != 0.0) {
    throw ConfigError("damping-matrix oracle requires jz = 0: a z-z coupling "
                      "breaks the closed evolution of quadratic Majorana "
                      "correlators");
  }
  const int n = params.n_sites;
  const int m = 2 * n;

  // Single-particle block.  The Majorana flavor conventions alternate with
  // site parity, which makes the hopping amplitude uniform per bond type and
  // attaches an alternating sign to the field entries.
  h_ = RMat::Zero(m, m);
  for (int bond = 0; bond < n - 1; ++bond) {
    const double t = bond % 2 == 0 ? -2.0 * params.jx : 2.0 * params.jy;
    h_(bond, bond + 1) = t;
    h_(bond + 1, bond) = -t;
  }
  for (int l = 0; l < n; ++l) {
    const double field = 2.0 * params.b * l * (l % 2 == 0 ? -1.0 : 1.0);
    h_(l, n + l) = field;
    h_(n + l, l) = -field;
  }

  // Probe Z_N and initial state Z_N rho_ss in coefficient form.  The scale
  // is pinned by the C(0) = 1 calibration check below; the overall sign
  // squares out of the correlator.
  probe_ = RMat::Zero(m, m);
  probe_(n - 1, m - 1) = 2.0;
  probe_(m - 1, n - 1) = -2.0;
  initial_ = probe_ / std::pow(2.0, n);

  // Damping matrix on row-major vectorized coefficient matrices,
  //   X o = h o - o h - sum_l L_l o L_l - 4 gamma o,
  // where L_l carries the dephasing channel of site l.
  const int d = m * m;
  RMat x = RMat::Zero(d, d);
  auto at = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        x(at(i, j), at(k, j)) += h_(i, k);
        x(at(i, j), at(i, k)) -= h_(k, j);
      }
    }
  }
  struct Entry {
    int row;
    int col;
    double val;
  };
  const double root = 2.0 * std::sqrt(params.gamma);
  for (int l = 0; l < n; ++l) {
    const Entry entries[2] = {{l, n + l, root}, {n + l, l, -root}};
    for (const Entry& a : entries) {
      for (const Entry& c : entries) {
        x(at(a.row, c.col), at(a.col, c.row)) -= a.val * c.val;
      }
    }
  }
  x.diagonal().array() -= 4.0 * params.gamma;

  CMat vecs;
  Eigen::EigenSolver<RMat> solver(x);
  if (solver.info() == Eigen::Success) {
    values_ = solver.eigenvalues();
    vecs = solver.eigenvectors();
  } else {
    // purely imaginary pairs (gamma = 0) can stall the real Schur
    // iteration; the complex-shift variant handles them
    Eigen::ComplexEigenSolver<CMat> retry(x.cast<Cplx>());
    if (retry.info() != Eigen::Success) {
      throw InvariantError(
          "damping-matrix eigendecomposition did not converge");
    }
    values_ = retry.eigenvalues();
    vecs = retry.eigenvectors();
  }

  const double re_max = values_.real().maxCoeff();
  if (re_max > 1e-10) {
    std::ostringstream msg;
    msg << "damping-matrix spectrum leaks into the right half-plane "
        << "(max Re = " << re_max << ")";
    throw InvariantError(msg.str());
  }

  CVec flat_initial(d);
  CVec flat_probe(d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      flat_initial[at(i, j)] = initial_(i, j);
      flat_probe[at(i, j)] = probe_(i, j);
    }
  }
  const CVec alpha = vecs.partialPivLu().solve(flat_initial);
  overlaps_ = alpha.cwiseAbs();
  // C(t) = (2^N / 8) sum_ij probe_ij o_ij(t), a plain bilinear contraction.
  const CVec through = vecs.transpose() * flat_probe;
  weights_ = (std::pow(2.0, n) / 8.0) * through.cwiseProduct(alpha);

  const Cplx c0 = weights_.sum();
  if (std::abs(c0 - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "damping-matrix calibration failed: C(0) = " << c0
        << " instead of 1";
    throw InvariantError(msg.str());
  }
}

TimeSeries DampingOracle::correlation(const RVec& times) const {
  return series_from_modes(values_, weights_, times);
}

RelaxationRate DampingOracle::relaxation_rate(double weight_cut) const {
  return relaxation_from_modes(values_, weights_, weight_cut);
}

}  // namespace lkpm
