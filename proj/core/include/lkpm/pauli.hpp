#pragma once

#include <cstdint>
#include <vector>

#include "lkpm/types.hpp"

namespace lkpm {

// One product of single-site Pauli operators on an n-site chain, stored as a
// pair of bit masks over sites.  Site l maps to bit l of the basis index and
// a bit value of 0 means sigma^z = +1.  The word acts on a basis state as
//
//   W |s> = coeff * (-1)^popcount(s & sign) * |s ^ flip>
//
// X contributes to flip, Z to sign, Y to both, and coeff absorbs a factor of
// i per Y so that the stored masks act exactly as the operator product.
struct PauliTerm {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  Cplx coeff = 0.0;
};

/// Sum of Pauli words plus a scalar multiple of the identity.
struct PauliTerms {
  int n_sites = 0;
  std::vector<PauliTerm> terms;
  Cplx shift = 0.0;

  std::size_t dim() const { return std::size_t{1} << n_sites; }
};

/// One factor of a Pauli word: a site index and one of 'X', 'Y', 'Z'.
struct SiteFactor {
  int site = 0;
  char op = 'Z';
};

/// Builds a Pauli word from explicit factors.  Throws InvariantError on
/// repeated sites, out-of-range sites or unknown operator labels.
PauliTerm make_term(int n_sites, Cplx coeff, const std::vector<SiteFactor>& factors);

/// Hermitian conjugate.  The masks of a word are unchanged under dagger;
/// only the coefficient picks up a conjugate and a phase.
PauliTerms adjoint(const PauliTerms& ops);

/// Largest |i - j| over sites touched by a single term; 0 for pure shifts.
int max_coupling_range(const PauliTerms& ops);

/// Sum of |coeff| over all terms (the identity shift is not included).
double coeff_l1_norm(const PauliTerms& ops);

/// Assembles the operator as a sparse matrix.  Dimension-capped, intended
/// for cross checks and small systems.
SparseOp to_sparse(const PauliTerms& ops, std::size_t max_dim = std::size_t{1} << 16);

/// Dense variant of to_sparse with a tighter default cap.
CMat to_dense(const PauliTerms& ops, std::size_t max_dim = std::size_t{1} << 13);

/// y = ops * x for a dense state vector (allocating convenience overload below).
void apply(const PauliTerms& ops, const CVec& x, CVec& y);
CVec apply(const PauliTerms& ops, const CVec& x);

// Matrix-free application engine.  All flip-free terms and the shift are
// fused into a single stored diagonal; the remaining terms are applied as
// masked permutation passes.  Adjoint application reuses the same masks with
// conjugated diagonal and per-term adjoint coefficients.
class PauliApplier {
 public:
  explicit PauliApplier(const PauliTerms& ops);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return static_cast<std::size_t>(diag_.size()); }
  std::size_t offdiag_terms() const { return offdiag_.size(); }

  /// y = (omega - ops) x, or y = (conj(omega) - ops^dag) x when adj is set.
  void apply_shifted(Cplx omega, bool adj, const CVec& x, CVec& y) const;

  /// Fused Chebyshev step for the moment recursion.  On entry y holds the
  /// iterate from two steps back; on exit
  ///   y <- scale * (omega - ops) x - y              (adj = false)
  ///   y <- scale * (conj(omega) - ops^dag) x - y    (adj = true)
  void cheb_step(Cplx omega, bool adj, double scale, const CVec& x, CVec& y) const;

 private:
  struct OffTerm {
    std::uint64_t flip;
    std::uint64_t sign;
    Cplx coeff;
    Cplx coeff_adj;
  };

  int n_sites_;
  CVec diag_;
  CVec diag_conj_;
  std::vector<OffTerm> offdiag_;
};

}  // namespace lkpm
