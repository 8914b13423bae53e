#pragma once

#include <array>
#include <vector>

#include "lkpm/pauli.hpp"

namespace lkpm {

struct MpsOptions {
  int chi_max = 128;
  double eps = 1e-8;  // relative discarded 2-norm tolerance per bond split
};

// Matrix product state over sites of local dimension 2.  site[i][s] is the
// bond matrix (chi_left x chi_right) of physical value s; boundary bonds have
// dimension 1.  A scalar prefactor is kept separate so linear combinations
// with exact coefficients never touch the tensors.
struct Mps {
  std::vector<std::array<CMat, 2>> site;
  Cplx prefactor = 1.0;

  int n_sites() const { return static_cast<int>(site.size()); }
  int bond(int i) const { return static_cast<int>(site[i][0].cols()); }
  int max_bond() const;
  double norm() const;
  void check_consistent() const;  // bond matching, boundary dims
};

/// Product of two-site states over adjacent pairs (2k, 2k+1): pair k carries
/// the state sum_{s,t} pair[k](s,t) |s t>.  The vectorized identity and the
/// probe vectors of the doubled chain are all of this form.
Mps mps_pair_product(const std::vector<Eigen::Matrix2cd>& pairs);

/// Full product state from per-site amplitudes.
Mps mps_product_state(const std::vector<std::array<Cplx, 2>>& amps);

/// Exact MPS of a dense state (successive SVD splits, no truncation).
Mps mps_from_dense(const CVec& v, int n_sites);

CVec mps_to_dense(const Mps& m, std::size_t max_dim = std::size_t{1} << 20);

/// <a|b> including prefactors.
Cplx inner(const Mps& a, const Mps& b);

/// Multiplies by the single-site operator diag(1, -1) on one chain site.
void apply_site_z(Mps& m, int chain_site);

/// Direct sum a + b (no compression; see compress).
Mps add(const Mps& a, const Mps& b);

struct CompressStats {
  double trunc_error = 0.0;  // accumulated 2-norm error bound over all cuts
  int max_bond = 0;
};

/// Canonicalizes left-to-right (QR), then truncates right-to-left with
/// two-site SVD splits.  The returned error estimate is the sum of per-cut
/// discarded 2-norms, an upper bound on the true 2-norm change.
CompressStats compress(Mps& m, const MpsOptions& opt);

// Matrix product operator; w[i][s_out][s_in] is the (left-bond x right-bond)
// coefficient matrix of the local transition |s_in> -> |s_out|.
struct Mpo {
  std::vector<std::array<std::array<CMat, 2>, 2>> w;

  int n_sites() const { return static_cast<int>(w.size()); }
  int bond(int i) const { return static_cast<int>(w[i][0][0].cols()); }
  int max_bond() const;
};

/// Exact finite-state-automaton MPO of (identity_coeff + sum of terms).
/// Requires coupling range <= 2 (interleaved layout); wider terms are
/// rejected since they would make the automaton width grow with N.
Mpo mpo_from_terms(const PauliTerms& ops, Cplx identity_coeff = 0.0);

/// MPO of (omega - ops), or (conj(omega) - ops^dag) when adj is set; this is
/// the shifted generator the Chebyshev recursion applies.
Mpo mpo_shifted(const PauliTerms& ops, Cplx omega, bool adj);

/// Dense matrix of the MPO (cross checks only).
CMat mpo_to_dense(const Mpo& op, std::size_t max_dim = std::size_t{1} << 13);

struct ApplyResult {
  Mps out;
  double trunc_error = 0.0;
  int max_bond = 0;
};

/// op * m as the exact tensor product followed by one SVD compression.  The
/// reported trunc_error upper-bounds the true 2-norm change.
ApplyResult apply_mpo(const Mpo& op, const Mps& m, const MpsOptions& opt);

/// Same contraction fused with on-the-fly truncation (zip-up sweep followed
/// by a compression trim).  Cheaper than apply_mpo for large bonds, but the
/// in-flight cuts happen in a non-isometric gauge, so trunc_error is an
/// estimate rather than a bound; tightening eps drives the true error down.
ApplyResult apply_mpo_zipup(const Mpo& op, const Mps& m, const MpsOptions& opt);

}  // namespace lkpm
