#include "lkpm/vectorize.hpp"

#include <bit>
#include <string>

namespace lkpm {

int ket_site(int l, int /*n_sites*/, VectorBasis basis) {
  return basis == VectorBasis::Interleaved ? 2 * l : l;
}

int bra_site(int l, int n_sites, VectorBasis basis) {
  return basis == VectorBasis::Interleaved ? 2 * l + 1 : n_sites + l;
}

namespace {

// Doubled-chain index of the matrix element (ket, bra).
inline std::size_t pair_index(std::size_t ket, std::size_t bra, int n, VectorBasis basis) {
  if (basis == VectorBasis::Stacked) return ket | (bra << n);
  std::size_t j = 0;
  for (int l = 0; l < n; ++l) {
    j |= ((ket >> l) & 1u) << (2 * l);
    j |= ((bra >> l) & 1u) << (2 * l + 1);
  }
  return j;
}

inline int doubled_sites(const CMat& rho) {
  const std::size_t d = static_cast<std::size_t>(rho.rows());
  if (rho.cols() != rho.rows() || d == 0 || (d & (d - 1)) != 0)
    throw InvariantError("vectorize: density matrix must be square with power-of-two dimension");
  return std::countr_zero(d);
}

}  // namespace

CVec vectorize(const CMat& rho, VectorBasis basis) {
  const int n = doubled_sites(rho);
  const std::size_t dim = std::size_t{1} << n;
  CVec v(dim * dim);
  for (std::size_t bra = 0; bra < dim; ++bra)
    for (std::size_t ket = 0; ket < dim; ++ket)
      v[pair_index(ket, bra, n, basis)] = rho(ket, bra);
  return v;
}

CMat devectorize(const CVec& v, int n_sites, VectorBasis basis) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (static_cast<std::size_t>(v.size()) != dim * dim)
    throw InvariantError("devectorize: vector length does not match 4^n_sites");
  CMat rho(dim, dim);
  for (std::size_t bra = 0; bra < dim; ++bra)
    for (std::size_t ket = 0; ket < dim; ++ket)
      rho(ket, bra) = v[pair_index(ket, bra, n_sites, basis)];
  return rho;
}

PauliTerms vectorized_liouvillian(const ModelParams& p, VectorBasis basis) {
  p.validate();
  const int n = p.n_sites;
  const PauliTerms h = hamiltonian_terms(p);

  PauliTerms lt;
  lt.n_sites = 2 * n;
  lt.shift = -p.gamma * n;

  // Recover per-site labels of each Hamiltonian word from its masks; the
  // stored coefficient carries i^{#Y}, which make_term will re-apply, so we
  // divide it back out here.
  for (const auto& t : h.terms) {
    std::vector<SiteFactor> ket_f, bra_f;
    int ny = 0;
    for (int l = 0; l < n; ++l) {
      const bool fl = (t.flip >> l) & 1u;
      const bool sg = (t.sign >> l) & 1u;
      if (!fl && !sg) continue;
      const char op = fl ? (sg ? 'Y' : 'X') : 'Z';
      if (op == 'Y') ++ny;
      ket_f.push_back({ket_site(l, n, basis), op});
      bra_f.push_back({bra_site(l, n, basis), op});
    }
    Cplx c = t.coeff;
    for (int k = 0; k < ny; ++k) c /= Cplx(0.0, 1.0);
    const double tsign = (ny % 2 == 0) ? 1.0 : -1.0;
    lt.terms.push_back(make_term(2 * n, Cplx(0.0, -1.0) * c, ket_f));
    lt.terms.push_back(make_term(2 * n, Cplx(0.0, 1.0) * c * tsign, bra_f));
  }
  for (int l = 0; l < n; ++l)
    lt.terms.push_back(make_term(
        2 * n, p.gamma, {{ket_site(l, n, basis), 'Z'}, {bra_site(l, n, basis), 'Z'}}));
  return lt;
}

ProbePair probe_vectors(const ModelParams& p, VectorBasis basis) {
  p.validate();
  const int n = p.n_sites;
  const std::size_t dim = std::size_t{1} << n;
  const double inv_trace = 1.0 / static_cast<double>(dim);
  ProbePair pr;
  pr.left = CVec::Zero(dim * dim);
  pr.right = CVec::Zero(dim * dim);
  for (std::size_t s = 0; s < dim; ++s) {
    const std::size_t j = pair_index(s, s, n, basis);
    const double z = ((s >> (n - 1)) & 1u) ? -1.0 : 1.0;
    pr.left[j] = z;
    pr.right[j] = z * inv_trace;
  }
  return pr;
}

MpsProbePair mps_probe_vectors(const ModelParams& p) {
  p.validate();
  std::vector<Eigen::Matrix2cd> right_pairs(p.n_sites, 0.5 * Eigen::Matrix2cd::Identity());
  std::vector<Eigen::Matrix2cd> left_pairs(p.n_sites, Eigen::Matrix2cd::Identity());
  Eigen::Matrix2cd z;
  z << 1.0, 0.0, 0.0, -1.0;
  right_pairs.back() = 0.5 * z;
  left_pairs.back() = z;
  return {mps_pair_product(left_pairs), mps_pair_product(right_pairs)};
}

}  // namespace lkpm
