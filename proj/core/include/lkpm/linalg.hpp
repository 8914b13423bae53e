#pragma once

#include "lkpm/types.hpp"

namespace lkpm {

// Full non-Hermitian eigendecomposition A = V diag(values) W^dag with
// biorthonormal left/right pairs, W^dag V = 1.  Columns of `right` are
// unit-norm right eigenvectors; column n of `left` is the left eigenvector
// belonging to values[n].  Computing the left family as the inverse of V
// biorthogonalizes degenerate clusters implicitly; the postconditions below
// are checked rather than assumed.
struct EigenDecomposition {
  CVec values;
  CMat right;
  CMat left;
};

/// Dense non-Hermitian diagonalization with verified biorthogonality and
/// reconstruction.  Throws ResourceError above max_dim and InvariantError
/// when either check degrades beyond tol (relative to ||A||).
EigenDecomposition eig_nonhermitian(const CMat& a, double tol = 1e-8,
                                    std::size_t max_dim = 4096);

struct Svd {
  CMat u;
  RVec singular_values;
  CMat v;  // a = u * singular_values.asDiagonal() * v.adjoint()
};

/// Thin SVD with a reconstruction check at tol * max(1, ||A||_F).
Svd svd_thin(const CMat& a, double tol = 1e-10);

/// Kronecker product; the right factor varies fastest, so for chain
/// operators built as kron(site n-1, ..., site 0) site 0 is the last factor.
CMat kron(const CMat& a, const CMat& b);

}  // namespace lkpm
