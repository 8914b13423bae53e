#pragma once

#include "lkpm/pauli.hpp"

namespace lkpm {

// Dissipative compass chain on an open boundary of even length:
//   H = - sum_{l=1}^{N/2}   jx X_{2l-1} X_{2l}
//       - sum_{l=1}^{N/2-1} jy Y_{2l}   Y_{2l+1}
//       + sum_{l=1}^{N}     b (l-1) Z_l
//       + sum_{l=1}^{N-1}   jz Z_l Z_{l+1}        (sites 1-based here)
// with uniform sigma^z dephasing of rate gamma on every site.
struct ModelParams {
  int n_sites = 4;
  double jx = 0.75;
  double jy = 0.5;
  double jz = 0.0;
  double b = 0.0;  // linear field gradient; 0-based site l carries b * l
  double gamma = 0.2;

  /// Throws ConfigError on invalid combinations (odd or non-positive length,
  /// negative dissipation).
  void validate() const;
};

/// Hamiltonian as a sum of Pauli words on n_sites sites.
PauliTerms hamiltonian_terms(const ModelParams& p);

/// Global spin-flip parity Q = prod_l Z_l; commutes with the Hamiltonian and
/// with every jump operator, so (1 +/- Q) / 2^N are exact steady states.
PauliTerms parity_operator(int n_sites);

// Dense right-hand side of the master equation
//   d rho / dt = -i [H, rho] + gamma sum_l (Z_l rho Z_l - rho).
// The dephasing channel is diagonal in the z basis and is applied as an
// elementwise mask, so a single apply costs two matrix products.
class LindbladDense {
 public:
  explicit LindbladDense(const ModelParams& p);

  const ModelParams& params() const { return p_; }
  const CMat& hamiltonian() const { return h_; }

  void apply(const CMat& rho, CMat& out) const;
  CMat apply(const CMat& rho) const;

 private:
  ModelParams p_;
  CMat h_;
  RMat dephase_;  // gamma * (sum_l z_l(i) z_l(j) - N), elementwise factor
};

}  // namespace lkpm
