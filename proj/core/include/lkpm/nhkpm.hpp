#pragma once

#include <cstdint>
#include <vector>

#include "lkpm/pauli.hpp"
#include "lkpm/tn.hpp"

namespace lkpm {

// Spectra of the generator are probed through the Hermitian doubling
//   H(w) = [[0, w - L], [conj(w) - L^dag, 0]],
// whose eigenvalues come in +/- singular-value pairs of (w - L).  Chebyshev
// moments of H between block-separated boundary vectors reconstruct the
// resolvent G(w) = <L|(w - L)^{-1}|R>, and the map C(w) follows from the
// anti-holomorphic derivative of G over a frequency grid.

struct KpmParams {
  int n_moments = 512;
  double scale = 0.0;   // spectral bound of H(w); 0 lets the map auto-estimate
  bool use_mirror = true;  // fill conj(w) rows by symmetry on symmetric grids

  // kernel resolution in scaled units; multiply by scale for frequency units
  double sigma_scaled() const { return kPi / n_moments; }
  void validate() const;  // n_moments >= 16
};

struct FrequencyGrid {
  double re_min = -1.0, re_max = 1.0;
  int n_re = 3;
  double im_min = -1.0, im_max = 1.0;
  int n_im = 3;

  void validate() const;  // at least 3 nodes per axis, increasing bounds
  double re_step() const { return (re_max - re_min) / (n_re - 1); }
  double im_step() const { return (im_max - im_min) / (n_im - 1); }
  Cplx node(int i_re, int i_im) const {
    return {re_min + i_re * re_step(), im_min + i_im * im_step()};
  }
  /// True when the imaginary axis sampling is symmetric about zero, so the
  /// row of node j mirrors onto row n_im-1-j.
  bool imag_symmetric() const;
};

/// Jackson kernel damping factors g_0..g_{M-1}.
RVec jackson_coefficients(int n_moments);

/// Chebyshev expansion coefficient of the principal-value inverse on [-1,1]:
/// 0 for even m, 2*(-1)^((m-1)/2) for odd m.
double pv_inverse_coefficient(int m);

/// Largest deviation between pv_inverse_coefficient and its Chebyshev-Gauss
/// quadrature evaluation over m < n_check with n_nodes nodes.  `corruption`
/// is added to each closed-form coefficient; nonzero values let callers
/// demonstrate that the startup gate actually trips.
double pv_inverse_quadrature_residual(int n_check, int n_nodes, double corruption = 0.0);

/// Spectral bound estimate: 10% margin over the largest grid-corner modulus
/// plus the coefficient 1-norm of the generator (each Pauli word has unit
/// operator norm).  Guaranteed >= spectral radius of H(w) on the grid.
double estimate_scale(const PauliTerms& ops, const FrequencyGrid& grid);

struct BlockVec {
  CVec upper;
  CVec lower;
};

/// One application of the doubled operator: (upper, lower) ->
/// ((w - L) lower, (conj(w) - L^dag) upper) without materializing it.
BlockVec hermitrized_apply(const PauliApplier& op, Cplx omega, const BlockVec& v);

/// Moments mu_m = <L| T_m(H(w)/a) |R> for m = 0..M-1 with |R> = (right, 0)
/// and <L| = (0, left).  Even moments vanish by block parity and are
/// returned as exact zeros; the recursion tracks only the nonzero block of
/// each iterate, costing one masked matvec per moment.
/// Throws InvariantError with a rescale hint when iterate norms outgrow the
/// Chebyshev bound (scale below the spectral radius).
CVec chebyshev_moments_dense(const PauliApplier& op, Cplx omega, const CVec& left,
                             const CVec& right, const KpmParams& kpm);

struct BondLogEntry {
  int step = 0;  // Chebyshev index m
  int site = 0;  // bond to the right of this site
  int bond = 0;
};

struct MpsMoments {
  CVec mu;
  double trunc_error = 0.0;  // accumulated per-step truncation estimate
  int max_bond = 0;
};

/// Same recursion with the iterate blocks held as compressed MPS.
MpsMoments chebyshev_moments_mps(const PauliTerms& ops, Cplx omega, const Mps& left,
                                 const Mps& right, const KpmParams& kpm, const MpsOptions& opt,
                                 std::vector<BondLogEntry>* bond_log = nullptr);

/// Kernel-damped resolvent at the expansion origin:
///   G = (1/a) * sum_m c_m g_m mu_m
/// with c_m the principal-value inverse coefficients (gated once per process
/// by the quadrature self-check) and g_m the Jackson factors.
Cplx greens_from_moments(const CVec& mu, double scale);

struct KpmDiagnostics {
  double scale = 0.0;
  int n_moments = 0;
  int nodes_computed = 0;        // excludes mirror-filled nodes
  double max_trunc_error = 0.0;  // MPS backend only
  int max_bond = 0;              // MPS backend only
  double symmetry_residual = -1.0;  // filled when symmetric grid, mirror off
};

struct SpectralMap {
  FrequencyGrid grid;
  CMat greens;  // n_im rows (imaginary axis) by n_re columns
  CMat corr;    // C(w) = (1/pi) d/d(conj w) G, central differences
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> valid;
  KpmDiagnostics diag;
};

SpectralMap spectral_map_dense(const PauliTerms& ops, const CVec& left, const CVec& right,
                               const FrequencyGrid& grid, const KpmParams& kpm, int n_workers = 1);

SpectralMap spectral_map_mps(const PauliTerms& ops, const Mps& left, const Mps& right,
                             const FrequencyGrid& grid, const KpmParams& kpm,
                             const MpsOptions& opt, int n_workers = 1);

}  // namespace lkpm
