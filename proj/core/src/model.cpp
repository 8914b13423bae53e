#include "lkpm/model.hpp"

#include <bit>
#include <string>

namespace lkpm {

void ModelParams::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0)
    throw ConfigError("model: n_sites must be even and >= 2, got " + std::to_string(n_sites));
  if (n_sites > 63) throw ConfigError("model: n_sites must be <= 63");
  if (gamma < 0.0) throw ConfigError("model: gamma must be non-negative");
}

PauliTerms hamiltonian_terms(const ModelParams& p) {
  p.validate();
  const int n = p.n_sites;
  PauliTerms h;
  h.n_sites = n;
  for (int l = 1; l <= n / 2; ++l)
    h.terms.push_back(make_term(n, -p.jx, {{2 * l - 2, 'X'}, {2 * l - 1, 'X'}}));
  for (int l = 1; l <= n / 2 - 1; ++l)
    h.terms.push_back(make_term(n, -p.jy, {{2 * l - 1, 'Y'}, {2 * l, 'Y'}}));
  if (p.b != 0.0)
    for (int l = 1; l <= n; ++l)
      h.terms.push_back(make_term(n, p.b * (l - 1), {{l - 1, 'Z'}}));
  if (p.jz != 0.0)
    for (int l = 1; l <= n - 1; ++l)
      h.terms.push_back(make_term(n, p.jz, {{l - 1, 'Z'}, {l, 'Z'}}));
  return h;
}

PauliTerms parity_operator(int n_sites) {
  std::vector<SiteFactor> factors;
  factors.reserve(n_sites);
  for (int l = 0; l < n_sites; ++l) factors.push_back({l, 'Z'});
  PauliTerms q;
  q.n_sites = n_sites;
  q.terms.push_back(make_term(n_sites, 1.0, factors));
  return q;
}

LindbladDense::LindbladDense(const ModelParams& p) : p_(p) {
  p.validate();
  const std::size_t dim = std::size_t{1} << p.n_sites;
  if (dim > 4096)
    throw ResourceError("LindbladDense: 2^" + std::to_string(p.n_sites) +
                        " exceeds the dense density-matrix cap");
  h_ = to_dense(hamiltonian_terms(p), dim);
  dephase_.resize(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      // sum_l z_l(i) z_l(j) = N - 2 * popcount(i ^ j): differing bits flip sign
      const int agree = p.n_sites - 2 * std::popcount(i ^ j);
      dephase_(i, j) = p.gamma * static_cast<double>(agree - p.n_sites);
    }
  }
}

void LindbladDense::apply(const CMat& rho, CMat& out) const {
  if (rho.rows() != h_.rows() || rho.cols() != h_.cols())
    throw InvariantError("LindbladDense::apply: density matrix dimension mismatch");
  out = Cplx(0.0, -1.0) * (h_ * rho - rho * h_);
  out.array() += dephase_.array().cast<Cplx>() * rho.array();
}

CMat LindbladDense::apply(const CMat& rho) const {
  CMat out;
  apply(rho, out);
  return out;
}

}  // namespace lkpm
