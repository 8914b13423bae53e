#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace lkpm {

using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using SparseOp = Eigen::SparseMatrix<Cplx>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// A numerical invariant or physical consistency check failed at run time.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration file or command line is malformed or inconsistent.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested computation exceeds a hard resource limit (dimension caps,
/// file I/O failures and the like).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lkpm
