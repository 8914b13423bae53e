#include "lkpm/pauli.hpp"

#include <bit>
#include <string>
#include <vector>

namespace lkpm {

namespace {

inline double parity_sign(std::uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

inline Cplx adjoint_coeff(const PauliTerm& t) {
  // W|s> = c (-1)^{s.sign} |s^flip>  gives  W^dag|s> = conj(c) (-1)^{(s^flip).sign} |s^flip>,
  // so the adjoint keeps the masks and multiplies conj(c) by (-1)^{|flip & sign|}.
  return std::conj(t.coeff) * parity_sign(t.flip & t.sign);
}

}  // namespace

PauliTerm make_term(int n_sites, Cplx coeff, const std::vector<SiteFactor>& factors) {
  if (n_sites < 1 || n_sites > 63)
    throw InvariantError("make_term: n_sites must be in [1, 63], got " + std::to_string(n_sites));
  PauliTerm t;
  t.coeff = coeff;
  std::uint64_t seen = 0;
  for (const auto& f : factors) {
    if (f.site < 0 || f.site >= n_sites)
      throw InvariantError("make_term: site " + std::to_string(f.site) + " outside chain of length " +
                           std::to_string(n_sites));
    const std::uint64_t bit = std::uint64_t{1} << f.site;
    if (seen & bit)
      throw InvariantError("make_term: repeated site " + std::to_string(f.site));
    seen |= bit;
    switch (f.op) {
      case 'X':
        t.flip |= bit;
        break;
      case 'Y':
        t.flip |= bit;
        t.sign |= bit;
        t.coeff *= Cplx(0.0, 1.0);
        break;
      case 'Z':
        t.sign |= bit;
        break;
      default:
        throw InvariantError(std::string("make_term: unknown operator label '") + f.op + "'");
    }
  }
  return t;
}

PauliTerms adjoint(const PauliTerms& ops) {
  PauliTerms out;
  out.n_sites = ops.n_sites;
  out.shift = std::conj(ops.shift);
  out.terms.reserve(ops.terms.size());
  for (const auto& t : ops.terms)
    out.terms.push_back({t.flip, t.sign, adjoint_coeff(t)});
  return out;
}

int max_coupling_range(const PauliTerms& ops) {
  int range = 0;
  for (const auto& t : ops.terms) {
    const std::uint64_t support = t.flip | t.sign;
    if (support == 0) continue;
    const int lo = std::countr_zero(support);
    const int hi = 63 - std::countl_zero(support);
    range = std::max(range, hi - lo);
  }
  return range;
}

double coeff_l1_norm(const PauliTerms& ops) {
  double s = 0.0;
  for (const auto& t : ops.terms) s += std::abs(t.coeff);
  return s;
}

SparseOp to_sparse(const PauliTerms& ops, std::size_t max_dim) {
  const std::size_t dim = ops.dim();
  if (dim > max_dim)
    throw ResourceError("to_sparse: dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(max_dim));
  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(ops.terms.size() * dim + (ops.shift != 0.0 ? dim : 0));
  for (const auto& t : ops.terms)
    for (std::size_t s = 0; s < dim; ++s)
      trip.emplace_back(static_cast<int>(s ^ t.flip), static_cast<int>(s),
                        t.coeff * parity_sign(s & t.sign));
  if (ops.shift != 0.0)
    for (std::size_t s = 0; s < dim; ++s)
      trip.emplace_back(static_cast<int>(s), static_cast<int>(s), ops.shift);
  SparseOp m(static_cast<int>(dim), static_cast<int>(dim));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

CMat to_dense(const PauliTerms& ops, std::size_t max_dim) {
  const std::size_t dim = ops.dim();
  if (dim > max_dim)
    throw ResourceError("to_dense: dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(max_dim));
  CMat m = CMat::Zero(dim, dim);
  for (const auto& t : ops.terms)
    for (std::size_t s = 0; s < dim; ++s)
      m(s ^ t.flip, s) += t.coeff * parity_sign(s & t.sign);
  m.diagonal().array() += ops.shift;
  return m;
}

void apply(const PauliTerms& ops, const CVec& x, CVec& y) {
  const std::size_t dim = ops.dim();
  if (static_cast<std::size_t>(x.size()) != dim)
    throw InvariantError("apply: state dimension mismatch");
  y.resize(x.size());
  const Cplx* xd = x.data();
  Cplx* yd = y.data();
  for (std::size_t s = 0; s < dim; ++s) yd[s] = ops.shift * xd[s];
  for (const auto& t : ops.terms)
    for (std::size_t s = 0; s < dim; ++s)
      yd[s ^ t.flip] += t.coeff * parity_sign(s & t.sign) * xd[s];
}

CVec apply(const PauliTerms& ops, const CVec& x) {
  CVec y;
  apply(ops, x, y);
  return y;
}

PauliApplier::PauliApplier(const PauliTerms& ops) : n_sites_(ops.n_sites) {
  const std::size_t dim = ops.dim();
  diag_ = CVec::Constant(dim, ops.shift);
  for (const auto& t : ops.terms) {
    if (t.flip == 0) {
      for (std::size_t s = 0; s < dim; ++s) diag_[s] += t.coeff * parity_sign(s & t.sign);
    } else {
      offdiag_.push_back({t.flip, t.sign, t.coeff, adjoint_coeff(t)});
    }
  }
  diag_conj_ = diag_.conjugate();
}

void PauliApplier::apply_shifted(Cplx omega, bool adj, const CVec& x, CVec& y) const {
  const std::size_t n = dim();
  if (static_cast<std::size_t>(x.size()) != n)
    throw InvariantError("apply_shifted: state dimension mismatch");
  y.resize(x.size());
  y.setZero();
  cheb_step(omega, adj, 1.0, x, y);
}

void PauliApplier::cheb_step(Cplx omega, bool adj, double scale, const CVec& x, CVec& y) const {
  const std::size_t n = dim();
  const Cplx* xd = x.data();
  Cplx* yd = y.data();
  if (adj) {
    const Cplx wc = std::conj(omega);
    const Cplx* dd = diag_conj_.data();
    for (std::size_t s = 0; s < n; ++s) yd[s] = scale * ((wc - dd[s]) * xd[s]) - yd[s];
  } else {
    const Cplx* dd = diag_.data();
    for (std::size_t s = 0; s < n; ++s) yd[s] = scale * ((omega - dd[s]) * xd[s]) - yd[s];
  }
  for (const auto& t : offdiag_) {
    const Cplx c = scale * (adj ? t.coeff_adj : t.coeff);
    const std::uint64_t flip = t.flip;
    const std::uint64_t sign = t.sign;
    for (std::size_t s = 0; s < n; ++s) {
      const Cplx v = c * xd[s];
      yd[s ^ flip] -= (std::popcount(s & sign) & 1) ? -v : v;
    }
  }
}

}  // namespace lkpm
