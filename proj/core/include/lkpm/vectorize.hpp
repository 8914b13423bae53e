#pragma once

#include "lkpm/model.hpp"
#include "lkpm/tn.hpp"

namespace lkpm {

// Layout of the doubled chain carrying vectorized density matrices.
//
// Interleaved: ket bit of physical site l lives on chain site 2l and the bra
// bit on 2l + 1.  Every term of the vectorized generator then couples chain
// sites at distance at most 2, which keeps matrix product operators narrow.
//
// Stacked: ket bits occupy chain sites 0..N-1 and bra bits N..2N-1.  This is
// the plain column-major reshape of rho but makes dephasing terms long range.
enum class VectorBasis { Interleaved, Stacked };

/// Chain site carrying the ket (bra) bit of physical site l.
int ket_site(int l, int n_sites, VectorBasis basis);
int bra_site(int l, int n_sites, VectorBasis basis);

/// rho (2^N x 2^N, row index = ket) -> vector on the doubled chain (4^N).
CVec vectorize(const CMat& rho, VectorBasis basis);
CMat devectorize(const CVec& v, int n_sites, VectorBasis basis);

/// The vectorized generator as Pauli words on the doubled chain,
///   Ltilde = -i H(ket) + i H^T(bra) + gamma sum_l Z_l(ket) Z_l(bra) - gamma N.
/// Transposition of a Pauli word only contributes (-1)^{#Y}.
PauliTerms vectorized_liouvillian(const ModelParams& p, VectorBasis basis);

/// Probe pair of the edge-spin autocorrelator
///   C(t) = <Z_N(t) Z_N(0)>  over the maximally mixed steady state:
/// both vectors are Z on the ket copy of the last site applied to the
/// vectorized identity, with the 1/2^N of the state folded into `right`.
struct ProbePair {
  CVec left;
  CVec right;
};
ProbePair probe_vectors(const ModelParams& p, VectorBasis basis);

/// The same probes as matrix product states on the interleaved doubled
/// chain: each physical site contributes one ket/bra pair tensor, so only
/// the interleaved layout applies and every inter-pair bond has dimension 1.
struct MpsProbePair {
  Mps left;
  Mps right;
};
MpsProbePair mps_probe_vectors(const ModelParams& p);

}  // namespace lkpm
