#pragma once

#include "lkpm/observables.hpp"
#include "lkpm/vectorize.hpp"

namespace lkpm {

// Three independent exact references for the edge-spin autocorrelator:
// dense diagonalization of the vectorized generator, fixed-step RK4 on the
// density matrix, and the free-fermion damping matrix for the jz = 0 sector.
// They share no code with the polynomial pipeline beyond the model builders.

/// Relaxation rate read off a discrete mode expansion C(t) = sum w exp(v t).
/// Modes with |w| >= weight_cut * max|w| become peaks (height |w|, slowest
/// first); delta is |Re| of the first retained mode away from v = 0, so a
/// weighty steady mode never masquerades as a slow decay.
RelaxationRate relaxation_from_modes(const CVec& values, const CVec& weights,
                                     double weight_cut = 1e-3);

// Dense eigendecomposition of the vectorized generator.  C(t) follows from
// the biorthogonal expansion as sum_n w_n exp(v_n t) with
// w_n = (left probe . right eigvec)_n (left eigvec . right probe)_n.
class EdOracle {
 public:
  /// Diagonalizes the full 4^N x 4^N generator; at most 5 sites.
  explicit EdOracle(const ModelParams& params,
                    VectorBasis basis = VectorBasis::Interleaved);

  const ModelParams& params() const { return params_; }
  /// Generator eigenvalues and the matching expansion weights of C(t).
  const CVec& spectrum() const { return values_; }
  const CVec& weights() const { return weights_; }

  /// Exact series at the requested times (nonnegative, nondecreasing).
  TimeSeries correlation(const RVec& times) const;
  RelaxationRate relaxation_rate(double weight_cut = 1e-3) const;

 private:
  ModelParams params_;
  CVec values_;
  CVec weights_;
};

/// Classic fixed-step fourth-order Runge-Kutta march of the master equation
/// applied to y(0) = Z_N rho_ss, sampling C(t) = tr(Z_N y(t)) every
/// sample_stride steps (the final step is always emitted).  Guards: the
/// trace and hermiticity of y must stay within 1e-9 of the initial state and
/// a norm blow-up aborts with a suggested smaller step.  At most 7 sites.
TimeSeries rk4_autocorrelator(const ModelParams& params, double step,
                              double t_max, std::size_t sample_stride = 1);

// Quadratic-sector solver.  With jz = 0 the model maps to free Majorana
// modes under dephasing, and every operator in the correlator is quadratic,
//   O = (i/4) gamma^T o gamma  with  o = -o^T,
// so the 2N x 2N coefficient matrix evolves linearly under the 4N^2 x 4N^2
// damping matrix.  The mode expansion of C(t) then comes from one dense
// real eigendecomposition regardless of the chain length.
class DampingOracle {
 public:
  /// Builds and diagonalizes the damping matrix; at most 64 sites.  Throws
  /// ConfigError for jz != 0 and InvariantError when the spectrum leaks into
  /// the right half-plane or the t = 0 calibration C(0) = 1 fails.
  explicit DampingOracle(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  /// Single-particle block [[T, M], [-M, 0]]; antisymmetric by construction.
  const RMat& majorana_h() const { return h_; }
  /// Coefficient matrices of the probe Z_N and of y(0) = Z_N rho_ss.
  const RMat& observable_matrix() const { return probe_; }
  const RMat& initial_matrix() const { return initial_; }

  /// Damping-matrix eigenvalues, the raw left-overlap magnitudes
  /// |<n_L|y(0)>| and the full expansion weights of C(t).
  const CVec& spectrum() const { return values_; }
  const RVec& overlaps() const { return overlaps_; }
  const CVec& weights() const { return weights_; }

  TimeSeries correlation(const RVec& times) const;
  RelaxationRate relaxation_rate(double weight_cut = 1e-3) const;

 private:
  ModelParams params_;
  RMat h_;
  RMat probe_;
  RMat initial_;
  CVec values_;
  RVec overlaps_;
  CVec weights_;
};

}  // namespace lkpm
