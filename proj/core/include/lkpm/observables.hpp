#pragma once

#include <vector>

#include "lkpm/nhkpm.hpp"

namespace lkpm {

// Post-processing of spectral maps: the time-domain autocorrelator, the
// real-axis projection, and relaxation-rate extraction from either.

struct TimeSeries {
  RVec times;
  CVec values;
  Cplx captured_weight = 0.0;  // integrated map weight, the t = 0 value
  double imag_ratio = 0.0;     // max |Im C| / max |C| over the series
  bool coverage_warning = false;
};

/// C(t) = sum over valid grid nodes of (cell area) * exp(w t) * C(w).
/// `expected_weight` drives the coverage warning (|captured - expected|
/// beyond 3%); pass NaN to skip the check.  Times must be nondecreasing
/// and nonnegative.
TimeSeries autocorrelator(const SpectralMap& map, const RVec& times,
                          double expected_weight = 1.0);

struct ProjectedCorrelator {
  RVec gammas;         // real-axis positions (interior grid columns)
  RVec values;         // integral of Re C along the imaginary direction
  double imag_residual = 0.0;  // largest |Im column sum| relative to the values
  double edge_fraction = 0.0;  // spectral weight touching the top/bottom rows
  bool coverage_warning = false;
  KpmDiagnostics diag;
};

/// Column sums of an existing map over the valid interior.
ProjectedCorrelator projected_from_map(const SpectralMap& map);

/// Convenience wrappers: build a map whose interior columns are exactly the
/// requested gammas (uniformly spaced, padded by one column on each side so
/// every gamma has central-difference neighbors), then project.  A single
/// gamma uses the imaginary-axis spacing for the padding columns.
ProjectedCorrelator projected_correlator_dense(const PauliTerms& ops, const CVec& left,
                                               const CVec& right, const RVec& gammas,
                                               double im_min, double im_max, int n_im,
                                               const KpmParams& kpm, int n_workers = 1);
ProjectedCorrelator projected_correlator_mps(const PauliTerms& ops, const Mps& left,
                                             const Mps& right, const RVec& gammas, double im_min,
                                             double im_max, int n_im, const KpmParams& kpm,
                                             const MpsOptions& opt, int n_workers = 1);

struct PeakInfo {
  Cplx position;
  double height = 0.0;
};

struct RelaxationRate {
  bool found = false;
  double delta = 0.0;           // |Re| of the retained peak closest to the axis
  std::vector<PeakInfo> peaks;  // every detected local maximum, by |Re| ascending
};

/// Local maxima of |C(w)| over 3x3 neighborhoods with quadratic sub-grid
/// refinement.  Peaks below height_cut * (map maximum) and the peak at the
/// origin (the steady state) never contribute to delta; when nothing
/// survives, found stays false rather than reporting zero.
RelaxationRate relaxation_from_map(const SpectralMap& map, double height_cut = 1e-3);

/// One-dimensional variant on a projected correlator.
RelaxationRate relaxation_from_projection(const ProjectedCorrelator& cp,
                                          double height_cut = 1e-3);

/// Least-squares slope of log|C(t)| over the final time decade
/// [t_max / 10, t_max]; approximately -delta for a relaxing correlator.
double log_slope_tail(const TimeSeries& ts);

}  // namespace lkpm
