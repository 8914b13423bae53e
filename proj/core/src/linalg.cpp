#include "lkpm/linalg.hpp"

#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace lkpm {

EigenDecomposition eig_nonhermitian(const CMat& a, double tol, std::size_t max_dim) {
  if (a.rows() != a.cols()) throw InvariantError("eig_nonhermitian: matrix must be square");
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (n > max_dim)
    throw ResourceError("eig_nonhermitian: dimension " + std::to_string(n) + " exceeds cap " +
                        std::to_string(max_dim));

  Eigen::ComplexEigenSolver<CMat> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw InvariantError("eig_nonhermitian: eigensolver failed to converge");

  EigenDecomposition d;
  d.values = solver.eigenvalues();
  d.right = solver.eigenvectors();

  // Left family from the inverse of the right one; fails loudly for
  // (numerically) defective input via the checks below.
  const CMat winv = d.right.inverse();
  d.left = winv.adjoint();

  const double scale = std::max(1.0, a.norm());
  const double ortho = (winv * d.right - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(ortho < tol))
    throw InvariantError("eig_nonhermitian: biorthogonality residual " + std::to_string(ortho) +
                         " exceeds tolerance");
  const double recon = (d.right * d.values.asDiagonal() * winv - a).norm() / scale;
  if (!(recon < tol))
    throw InvariantError("eig_nonhermitian: reconstruction residual " + std::to_string(recon) +
                         " exceeds tolerance (matrix close to defective?)");
  return d;
}

Svd svd_thin(const CMat& a, double tol) {
  Eigen::BDCSVD<CMat> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw InvariantError("svd_thin: decomposition failed");
  Svd s;
  s.u = solver.matrixU();
  s.singular_values = solver.singularValues();
  s.v = solver.matrixV();
  const double scale = std::max(1.0, a.norm());
  const double recon = (s.u * s.singular_values.asDiagonal() * s.v.adjoint() - a).norm();
  if (!(recon < tol * scale))
    throw InvariantError("svd_thin: reconstruction residual " + std::to_string(recon / scale) +
                         " exceeds tolerance");
  return s;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace lkpm
