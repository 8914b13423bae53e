#include "lkpm/tn.hpp"

#include <algorithm>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lkpm/linalg.hpp"

namespace lkpm {

// Row convention: stacking the two physical blocks of a site tensor
// vertically gives row index (alpha + chi_left * s), i.e. block s occupies
// rows [s*chi_left, (s+1)*chi_left).  Columns compose the same way on the
// right bond.  MPO-times-MPS bonds compose mpo-major: (a * chi + alpha).

namespace {

struct TruncatedSvd {
  CMat u;          // (rows x k), left-isometric columns
  RVec sigma;      // k kept singular values
  CMat vdag;       // (k x cols), right-isometric rows
  double discarded = 0.0;
};

TruncatedSvd split_truncated(const CMat& m, int chi_max, double eps) {
  Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw InvariantError("tn: SVD failed during compression");
  const RVec& sv = svd.singularValues();
  const int full = static_cast<int>(sv.size());
  const double total2 = sv.squaredNorm();

  int keep = std::min(full, chi_max);
  if (total2 > 0.0) {
    const double budget = eps * eps * total2;
    double tail = 0.0;
    int k = full;
    while (k > 1) {
      const double next = tail + sv[k - 1] * sv[k - 1];
      if (next > budget) break;
      tail = next;
      --k;
    }
    keep = std::min(keep, k);
  } else {
    keep = 1;  // zero matrix: keep a single null direction
  }

  double disc2 = 0.0;
  for (int j = keep; j < full; ++j) disc2 += sv[j] * sv[j];

  TruncatedSvd r;
  r.u = svd.matrixU().leftCols(keep);
  r.sigma = sv.head(keep);
  r.vdag = svd.matrixV().leftCols(keep).adjoint();
  r.discarded = std::sqrt(disc2);
  return r;
}

CMat stack_blocks(const std::array<CMat, 2>& a) {
  CMat s(2 * a[0].rows(), a[0].cols());
  s.topRows(a[0].rows()) = a[0];
  s.bottomRows(a[0].rows()) = a[1];
  return s;
}

void unstack_blocks(const CMat& s, std::array<CMat, 2>& a) {
  const Eigen::Index rows = s.rows() / 2;
  a[0] = s.topRows(rows);
  a[1] = s.bottomRows(rows);
}

}  // namespace

int Mps::max_bond() const {
  int m = 0;
  for (int i = 0; i + 1 < n_sites(); ++i) m = std::max(m, bond(i));
  return m;
}

double Mps::norm() const {
  const Cplx n2 = inner(*this, *this);
  return std::sqrt(std::max(0.0, n2.real()));
}

void Mps::check_consistent() const {
  if (site.empty()) throw InvariantError("mps: empty chain");
  if (site.front()[0].rows() != 1 || site.back()[0].cols() != 1)
    throw InvariantError("mps: boundary bonds must have dimension 1");
  for (int i = 0; i < n_sites(); ++i) {
    if (site[i][0].rows() != site[i][1].rows() || site[i][0].cols() != site[i][1].cols())
      throw InvariantError("mps: physical blocks disagree at site " + std::to_string(i));
    if (i + 1 < n_sites() && site[i][0].cols() != site[i + 1][0].rows())
      throw InvariantError("mps: bond mismatch between sites " + std::to_string(i) + " and " +
                           std::to_string(i + 1));
  }
}

Mps mps_pair_product(const std::vector<Eigen::Matrix2cd>& pairs) {
  if (pairs.empty()) throw InvariantError("mps_pair_product: no pairs");
  Mps m;
  m.site.resize(2 * pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (int s = 0; s < 2; ++s) {
      CMat first = CMat::Zero(1, 2);
      first(0, s) = 1.0;
      m.site[2 * k][s] = first;
      CMat second(2, 1);
      second(0, 0) = pairs[k](0, s);
      second(1, 0) = pairs[k](1, s);
      m.site[2 * k + 1][s] = second;
    }
  }
  return m;
}

Mps mps_product_state(const std::vector<std::array<Cplx, 2>>& amps) {
  if (amps.empty()) throw InvariantError("mps_product_state: no sites");
  Mps m;
  m.site.resize(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i)
    for (int s = 0; s < 2; ++s) m.site[i][s] = CMat::Constant(1, 1, amps[i][s]);
  return m;
}

Mps mps_from_dense(const CVec& v, int n_sites) {
  if (n_sites < 1 || v.size() != Eigen::Index{1} << n_sites)
    throw InvariantError("mps_from_dense: length is not 2^n_sites");
  Mps m;
  m.site.resize(n_sites);
  // carrier rows (alpha + chi * s_i), columns the remaining configurations;
  // site 0 is the least significant bit of the dense index
  CMat t = v;
  t.resize(2, v.size() / 2);
  int chi = 1;
  for (int i = 0; i < n_sites - 1; ++i) {
    Eigen::BDCSVD<CMat> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw InvariantError("mps_from_dense: SVD failed");
    const int k = static_cast<int>(svd.singularValues().size());
    unstack_blocks(svd.matrixU(), m.site[i]);
    const CMat rest = svd.singularValues().asDiagonal() * svd.matrixV().adjoint();
    const Eigen::Index cols = rest.cols() / 2;
    t.resize(2 * k, cols);
    for (int s = 0; s < 2; ++s)
      for (Eigen::Index c = 0; c < cols; ++c)
        t.col(c).segment(s * k, k) = rest.col(s + 2 * c);
    chi = k;
  }
  unstack_blocks(t, m.site[n_sites - 1]);
  (void)chi;
  return m;
}

CVec mps_to_dense(const Mps& m, std::size_t max_dim) {
  m.check_consistent();
  const int n = m.n_sites();
  if ((std::size_t{1} << n) > max_dim)
    throw ResourceError("mps_to_dense: 2^" + std::to_string(n) + " exceeds cap");
  CMat p = CMat::Constant(1, 1, m.prefactor);
  for (int i = 0; i < n; ++i) {
    CMat next(2 * p.rows(), m.site[i][0].cols());
    next.topRows(p.rows()) = p * m.site[i][0];
    next.bottomRows(p.rows()) = p * m.site[i][1];
    p = std::move(next);
  }
  return CVec(p.col(0));
}

Cplx inner(const Mps& a, const Mps& b) {
  if (a.n_sites() != b.n_sites()) throw InvariantError("inner: site count mismatch");
  CMat e = CMat::Ones(1, 1);
  for (int i = 0; i < a.n_sites(); ++i) {
    CMat next = a.site[i][0].adjoint() * e * b.site[i][0];
    next += a.site[i][1].adjoint() * e * b.site[i][1];
    e = std::move(next);
  }
  return std::conj(a.prefactor) * b.prefactor * e(0, 0);
}

void apply_site_z(Mps& m, int chain_site) {
  if (chain_site < 0 || chain_site >= m.n_sites())
    throw InvariantError("apply_site_z: site out of range");
  m.site[chain_site][1] *= -1.0;
}

Mps add(const Mps& a, const Mps& b) {
  if (a.n_sites() != b.n_sites()) throw InvariantError("add: site count mismatch");
  const int n = a.n_sites();
  Mps out;
  out.site.resize(n);
  for (int i = 0; i < n; ++i) {
    const Cplx fa = (i == 0) ? a.prefactor : Cplx(1.0);
    const Cplx fb = (i == 0) ? b.prefactor : Cplx(1.0);
    for (int s = 0; s < 2; ++s) {
      const CMat& ma = a.site[i][s];
      const CMat& mb = b.site[i][s];
      const Eigen::Index rl = (i == 0) ? 1 : ma.rows() + mb.rows();
      const Eigen::Index rc = (i == n - 1) ? 1 : ma.cols() + mb.cols();
      CMat m = CMat::Zero(rl, rc);
      if (i == 0 && i == n - 1) {
        m(0, 0) = fa * ma(0, 0) + fb * mb(0, 0);
      } else if (i == 0) {
        m.block(0, 0, 1, ma.cols()) = fa * ma;
        m.block(0, ma.cols(), 1, mb.cols()) = fb * mb;
      } else if (i == n - 1) {
        m.block(0, 0, ma.rows(), 1) = ma;
        m.block(ma.rows(), 0, mb.rows(), 1) = mb;
      } else {
        m.block(0, 0, ma.rows(), ma.cols()) = ma;
        m.block(ma.rows(), ma.cols(), mb.rows(), mb.cols()) = mb;
      }
      out.site[i][s] = std::move(m);
    }
  }
  return out;
}

CompressStats compress(Mps& m, const MpsOptions& opt) {
  m.check_consistent();
  const int n = m.n_sites();
  CompressStats stats;
  if (n == 1) {
    stats.max_bond = 1;
    return stats;
  }

  // left-to-right QR canonicalization; afterwards every tensor but the last
  // is left-isometric and the norm sits at the right edge
  for (int i = 0; i + 1 < n; ++i) {
    const Eigen::Index chi_l = m.site[i][0].rows();
    const Eigen::Index chi_r = m.site[i][0].cols();
    const CMat s = stack_blocks(m.site[i]);
    const Eigen::Index k = std::min<Eigen::Index>(2 * chi_l, chi_r);
    Eigen::HouseholderQR<CMat> qr(s);
    const CMat q = qr.householderQ() * CMat::Identity(2 * chi_l, k);
    const CMat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    unstack_blocks(q, m.site[i]);
    for (int p = 0; p < 2; ++p) m.site[i + 1][p] = r * m.site[i + 1][p];
  }

  // right-to-left truncation sweep: at each cut site i keeps u*s and site
  // i+1 keeps the right-isometric v^dag, so every cut sees an isometric
  // environment and the local discarded weight is the exact local error
  const double pref_mag = std::abs(m.prefactor);
  for (int i = n - 2; i >= 0; --i) {
    const Eigen::Index chi_l = m.site[i][0].rows();
    const Eigen::Index chi_r = m.site[i + 1][0].cols();
    CMat theta(2 * chi_l, 2 * chi_r);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        theta.block(chi_l * s, chi_r * t, chi_l, chi_r) = m.site[i][s] * m.site[i + 1][t];
    const auto sp = split_truncated(theta, opt.chi_max, opt.eps);
    stats.trunc_error += pref_mag * sp.discarded;
    unstack_blocks(sp.u * sp.sigma.asDiagonal(), m.site[i]);
    for (int t = 0; t < 2; ++t) m.site[i + 1][t] = sp.vdag.middleCols(chi_r * t, chi_r);
  }

  // fold the overall scale into the prefactor to keep tensors O(1)
  double f = 0.0;
  for (int s = 0; s < 2; ++s) f += m.site[0][s].squaredNorm();
  f = std::sqrt(f);
  if (f > 0.0) {
    for (int s = 0; s < 2; ++s) m.site[0][s] /= f;
    m.prefactor *= f;
  }
  stats.max_bond = m.max_bond();
  return stats;
}

int Mpo::max_bond() const {
  int m = 0;
  for (int i = 0; i + 1 < n_sites(); ++i) m = std::max(m, bond(i));
  return m;
}

namespace {

// Local transition matrix of a Pauli word at one site, in mask form:
// op(s_in ^ f, s_in) = (-1)^(s_in & s).
void add_site_op(CMat& w00, CMat& w01, CMat& w10, CMat& w11, Eigen::Index row, Eigen::Index col,
                 bool f, bool s, Cplx coeff) {
  CMat* blocks[2][2] = {{&w00, &w01}, {&w10, &w11}};
  for (int sin = 0; sin < 2; ++sin) {
    const int sout = sin ^ (f ? 1 : 0);
    const Cplx val = coeff * ((sin && s) ? -1.0 : 1.0);
    (*blocks[sout][sin])(row, col) += val;
  }
}

struct TermSupport {
  int first = 0;
  int last = 0;
};

TermSupport support_of(const PauliTerm& t, int n) {
  TermSupport s{n, -1};
  const std::uint64_t mask = t.flip | t.sign;
  for (int l = 0; l < n; ++l)
    if ((mask >> l) & 1u) {
      s.first = std::min(s.first, l);
      s.last = std::max(s.last, l);
    }
  return s;
}

}  // namespace

Mpo mpo_from_terms(const PauliTerms& ops, Cplx identity_coeff) {
  const int n = ops.n_sites;
  if (n < 1) throw InvariantError("mpo_from_terms: empty chain");
  const Cplx c0 = identity_coeff + ops.shift;

  struct Channel {
    int term = 0;
    TermSupport sup;
  };
  std::vector<TermSupport> sup(ops.terms.size());
  bool any_term = false;
  for (std::size_t t = 0; t < ops.terms.size(); ++t) {
    if (ops.terms[t].coeff == 0.0) continue;
    sup[t] = support_of(ops.terms[t], n);
    if (sup[t].last < 0) {
      // flip == sign == 0: a shift in disguise; fold into the identity lane
      sup[t].first = sup[t].last = -1;
      continue;
    }
    if (sup[t].last - sup[t].first > 2)
      throw ConfigError("mpo_from_terms: term couples sites " + std::to_string(sup[t].first) +
                        " and " + std::to_string(sup[t].last) +
                        "; only range <= 2 is supported (use the interleaved layout)");
    any_term = true;
  }
  (void)any_term;

  // state layout per bond: 0 = identity-before (Init), 1 = identity-after
  // (Final), then one channel per multi-site term alive on that bond
  const int n_bonds = n - 1;
  std::vector<std::vector<int>> channels(n_bonds);  // term indices, ordered
  std::vector<bool> init_alive(n_bonds, false);
  for (int b = 0; b < n_bonds; ++b) {
    for (std::size_t t = 0; t < ops.terms.size(); ++t) {
      if (ops.terms[t].coeff == 0.0 || sup[t].last < 0) continue;
      if (sup[t].first <= b && b < sup[t].last) channels[b].push_back(static_cast<int>(t));
      if (sup[t].first > b) init_alive[b] = true;
    }
  }

  auto bond_states = [&](int b) -> int {
    if (b < 0 || b >= n_bonds) return 1;
    return 1 + (init_alive[b] ? 1 : 0) + static_cast<int>(channels[b].size());
  };
  // state index on bond b: Final = 0; Init = 1 if alive; channels follow
  auto init_index = [&](int b) -> int { return init_alive[b] ? 1 : -1; };
  auto channel_index = [&](int b, int term) -> int {
    const auto& ch = channels[b];
    for (std::size_t k = 0; k < ch.size(); ++k)
      if (ch[k] == term) return static_cast<int>(k) + 1 + (init_alive[b] ? 1 : 0);
    return -1;
  };
  // boundary conventions: left of site 0 the only state acts as Init; right
  // of site n-1 the only state acts as Final
  constexpr int kFinal = 0;

  Cplx shift_from_scalar_terms = 0.0;
  for (std::size_t t = 0; t < ops.terms.size(); ++t)
    if (ops.terms[t].coeff != 0.0 && sup[t].last < 0) shift_from_scalar_terms += ops.terms[t].coeff;
  const Cplx identity_total = c0 + shift_from_scalar_terms;

  Mpo out;
  out.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const int dl = bond_states(i - 1);
    const int dr = bond_states(i);
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) out.w[i][so][si] = CMat::Zero(dl, dr);
    CMat& w00 = out.w[i][0][0];
    CMat& w01 = out.w[i][0][1];
    CMat& w10 = out.w[i][1][0];
    CMat& w11 = out.w[i][1][1];

    const int init_l = (i == 0) ? 0 : init_index(i - 1);
    const int final_l = (i == 0) ? -1 : kFinal;
    const int init_r = (i == n - 1) ? -1 : init_index(i);
    const int final_r = (i == n - 1) ? 0 : kFinal;

    // identity lanes
    if (init_l >= 0 && init_r >= 0)
      add_site_op(w00, w01, w10, w11, init_l, init_r, false, false, 1.0);
    if (final_l >= 0 && final_r >= 0)
      add_site_op(w00, w01, w10, w11, final_l, final_r, false, false, 1.0);
    // global identity coefficient enters once, at site 0
    if (i == 0 && identity_total != 0.0 && final_r >= 0)
      add_site_op(w00, w01, w10, w11, 0, final_r, false, false, identity_total);

    for (std::size_t t = 0; t < ops.terms.size(); ++t) {
      const auto& term = ops.terms[t];
      if (term.coeff == 0.0 || sup[t].last < 0) continue;
      const bool f = (term.flip >> i) & 1u;
      const bool s = (term.sign >> i) & 1u;
      if (sup[t].first == i && sup[t].last == i) {
        if (init_l >= 0 && final_r >= 0)
          add_site_op(w00, w01, w10, w11, init_l, final_r, f, s, term.coeff);
      } else if (sup[t].first == i) {
        const int cr = channel_index(i, static_cast<int>(t));
        if (init_l >= 0 && cr >= 0)
          add_site_op(w00, w01, w10, w11, init_l, cr, f, s, term.coeff);
      } else if (sup[t].first < i && i < sup[t].last) {
        const int cl = channel_index(i - 1, static_cast<int>(t));
        const int cr = channel_index(i, static_cast<int>(t));
        if (cl >= 0 && cr >= 0) add_site_op(w00, w01, w10, w11, cl, cr, f, s, 1.0);
      } else if (sup[t].last == i) {
        const int cl = channel_index(i - 1, static_cast<int>(t));
        if (cl >= 0 && final_r >= 0) add_site_op(w00, w01, w10, w11, cl, final_r, f, s, 1.0);
      }
    }
  }
  return out;
}

Mpo mpo_shifted(const PauliTerms& ops, Cplx omega, bool adj) {
  PauliTerms neg;
  neg.n_sites = ops.n_sites;
  neg.shift = 0.0;
  neg.terms.reserve(ops.terms.size());
  const PauliTerms src = adj ? adjoint(ops) : ops;
  for (const auto& t : src.terms) neg.terms.push_back({t.flip, t.sign, -t.coeff});
  const Cplx ident = (adj ? std::conj(omega) : omega) - src.shift;
  return mpo_from_terms(neg, ident);
}

CMat mpo_to_dense(const Mpo& op, std::size_t max_dim) {
  const int n = op.n_sites();
  const std::size_t dim = std::size_t{1} << n;
  if (dim > max_dim) throw ResourceError("mpo_to_dense: dimension exceeds cap");
  // carrier: per right-bond state, the partial operator on sites 0..i
  std::vector<CMat> carry{CMat::Ones(1, 1)};
  std::size_t d = 1;
  for (int i = 0; i < n; ++i) {
    const int dr = op.bond(i);
    std::vector<CMat> next(dr, CMat::Zero(2 * d, 2 * d));
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) {
        const CMat& w = op.w[i][so][si];
        for (int a = 0; a < w.rows(); ++a)
          for (int b = 0; b < w.cols(); ++b) {
            if (w(a, b) == 0.0) continue;
            next[b].block(so * d, si * d, d, d) += w(a, b) * carry[a];
          }
      }
    carry = std::move(next);
    d *= 2;
  }
  return carry[0];
}

namespace {

constexpr Eigen::Index kBondEntryCap = Eigen::Index{1} << 23;

std::array<CMat, 2> local_product(const Mpo& op, const Mps& m, int i) {
  std::array<CMat, 2> b;
  const Eigen::Index rows = op.w[i][0][0].rows() * m.site[i][0].rows();
  const Eigen::Index cols = op.w[i][0][0].cols() * m.site[i][0].cols();
  if (rows * cols > kBondEntryCap)
    throw ResourceError("apply_mpo: bond explosion at site " + std::to_string(i));
  for (int so = 0; so < 2; ++so) {
    b[so] = CMat::Zero(rows, cols);
    for (int si = 0; si < 2; ++si) b[so] += kron(op.w[i][so][si], m.site[i][si]);
  }
  return b;
}

}  // namespace

ApplyResult apply_mpo(const Mpo& op, const Mps& m, const MpsOptions& opt) {
  if (op.n_sites() != m.n_sites()) throw InvariantError("apply_mpo: site count mismatch");
  ApplyResult r;
  r.out.prefactor = m.prefactor;
  r.out.site.resize(m.n_sites());
  for (int i = 0; i < m.n_sites(); ++i) r.out.site[i] = local_product(op, m, i);
  const auto stats = compress(r.out, opt);
  r.trunc_error = stats.trunc_error;
  r.max_bond = stats.max_bond;
  return r;
}

ApplyResult apply_mpo_zipup(const Mpo& op, const Mps& m, const MpsOptions& opt) {
  if (op.n_sites() != m.n_sites()) throw InvariantError("apply_mpo_zipup: site count mismatch");
  const int n = m.n_sites();
  ApplyResult r;
  r.out.prefactor = m.prefactor;
  r.out.site.resize(n);

  // left-to-right zip: carry maps the new left bond into the composed
  // (mpo x mps) bond; truncate on the fly, then trim right-to-left
  double zip_disc = 0.0;
  CMat carry = CMat::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const auto local = local_product(op, m, i);
    CMat t(2 * carry.rows(), local[0].cols());
    t.topRows(carry.rows()) = carry * local[0];
    t.bottomRows(carry.rows()) = carry * local[1];
    if (i == n - 1) {
      unstack_blocks(t, r.out.site[i]);
    } else {
      const auto sp = split_truncated(t, opt.chi_max, opt.eps);
      // keep the isometric factor in the state, push weights rightward
      unstack_blocks(sp.u, r.out.site[i]);
      carry = sp.sigma.asDiagonal() * sp.vdag;
      zip_disc += sp.discarded;
    }
  }
  const double pref_mag = std::abs(r.out.prefactor);
  const auto stats = compress(r.out, opt);
  r.trunc_error = stats.trunc_error + pref_mag * zip_disc;
  r.max_bond = stats.max_bond;
  return r;
}

}  // namespace lkpm
