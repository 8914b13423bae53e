#include <doctest.h>

#include <cmath>
#include <random>

#include "lkpm/linalg.hpp"
#include "lkpm/model.hpp"
#include "lkpm/nhkpm.hpp"
#include "lkpm/pauli.hpp"
#include "lkpm/tn.hpp"
#include "lkpm/vectorize.hpp"
#include "test_helpers.hpp"

using namespace lkpm;
using testutil::random_state;

namespace {

// Dawson function F(x) = exp(-x^2) int_0^x exp(t^2) dt for large arguments,
// via the asymptotic series F(x) ~ sum_k (2k-1)!! / (2^(k+1) x^(2k+1)).
double dawson_large(double x) {
  double term = 1.0 / (2.0 * x);
  double sum = term;
  for (int k = 1; k < 12; ++k) {
    term *= (2.0 * k - 1.0) / (2.0 * x * x);
    sum += term;
  }
  return sum;
}

PauliTerms scalar_operator(Cplx lambda) {
  PauliTerms ops;
  ops.n_sites = 1;
  ops.shift = lambda;
  return ops;
}

ModelParams small_model() {
  ModelParams p;
  p.n_sites = 2;
  p.jx = 0.75;
  p.jy = 0.5;
  p.b = 0.1;
  p.gamma = 0.15;
  return p;
}

// Reference moments from the explicitly doubled matrix and the plain
// three-term recursion, no block bookkeeping.
CVec reference_moments(const CMat& lt, Cplx omega, const CVec& left, const CVec& right,
                       int n_moments, double scale) {
  const Eigen::Index n = lt.rows();
  CMat h2 = CMat::Zero(2 * n, 2 * n);
  h2.block(0, n, n, n) = omega * CMat::Identity(n, n) - lt;
  h2.block(n, 0, n, n) = std::conj(omega) * CMat::Identity(n, n) - lt.adjoint();
  h2 /= scale;

  CVec big_l = CVec::Zero(2 * n), big_r = CVec::Zero(2 * n);
  big_l.tail(n) = left;
  big_r.head(n) = right;

  CVec mu(n_moments);
  CVec prev = big_r;
  CVec cur = h2 * big_r;
  mu[0] = big_l.dot(prev);
  mu[1] = big_l.dot(cur);
  for (int m = 2; m < n_moments; ++m) {
    CVec next = 2.0 * (h2 * cur) - prev;
    prev = std::move(cur);
    cur = std::move(next);
    mu[m] = big_l.dot(cur);
  }
  return mu;
}

}  // namespace

TEST_SUITE("nhkpm") {

TEST_CASE("jackson coefficients") {
  for (int m : {4, 16, 512}) CHECK(jackson_coefficients(m)[0] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(std::abs(jackson_coefficients(10000)[1] - 1.0) < 1e-3);

  SUBCASE("small order against extended-precision evaluation") {
    const RVec g = jackson_coefficients(4);
    for (int m = 0; m < 4; ++m) {
      const long double mp1 = 5.0L;
      const long double x = static_cast<long double>(kPi) * m / mp1;
      const long double want =
          ((4.0L - m + 1.0L) * std::cos(x) +
           std::sin(x) * std::cos(static_cast<long double>(kPi) / mp1) /
               std::sin(static_cast<long double>(kPi) / mp1)) /
          mp1;
      CHECK(std::abs(g[m] - static_cast<double>(want)) < 1e-15);
    }
  }
}

TEST_CASE("inverse expansion coefficients pass the quadrature check") {
  CHECK(pv_inverse_coefficient(0) == 0.0);
  CHECK(pv_inverse_coefficient(1) == 2.0);
  CHECK(pv_inverse_coefficient(2) == 0.0);
  CHECK(pv_inverse_coefficient(3) == -2.0);
  CHECK(pv_inverse_coefficient(5) == 2.0);
  CHECK(pv_inverse_coefficient(7) == -2.0);

  CHECK(pv_inverse_quadrature_residual(64, 4096) < 1e-12);
  // a corrupted table must be caught at this tolerance
  CHECK(pv_inverse_quadrature_residual(64, 4096, 1e-6) > 9e-7);
}

TEST_CASE("scale estimate bounds the doubled spectrum") {
  FrequencyGrid grid;
  grid.re_min = -1.6;
  grid.re_max = 1.6;
  grid.im_min = -1.2;
  grid.im_max = 1.2;
  grid.n_re = grid.n_im = 5;

  SUBCASE("trivial operator keeps only the corner plus margin") {
    PauliTerms none;
    none.n_sites = 2;
    CHECK(estimate_scale(none, grid) == doctest::Approx(2.2).epsilon(1e-12));
  }

  SUBCASE("dephasing-only bound") {
    ModelParams p;
    p.n_sites = 2;
    p.jx = p.jy = 0.0;
    p.gamma = 0.4;
    const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
    // one ZZ word per spin plus the identity shift, gamma each
    CHECK(estimate_scale(lt, grid) >= 2.0 + 2.0 * p.gamma * p.n_sites);
  }

  SUBCASE("random models stay below the bound") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      ModelParams p;
      p.n_sites = 2;
      p.jx = 2.0 * u(rng) - 1.0;
      p.jy = 2.0 * u(rng) - 1.0;
      p.jz = 2.0 * u(rng) - 1.0;
      p.b = u(rng);
      p.gamma = u(rng);
      const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
      const CMat ld = to_dense(lt);
      const double a = estimate_scale(lt, grid);
      for (int i : {0, 2, 4})
        for (int j : {0, 1, 4}) {
          const Cplx w = grid.node(i, j);
          const CMat b = w * CMat::Identity(16, 16) - ld;
          Eigen::BDCSVD<CMat> svd(b);
          CHECK(svd.singularValues()[0] <= a);
        }
    }
  }
}

TEST_CASE("doubled application has the advertised block structure") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const CMat ld = to_dense(lt);
  const PauliApplier op(lt);
  const Cplx omega(0.2, -0.4);
  std::mt19937_64 rng(21);
  const CVec psi = random_state(16, rng);

  SUBCASE("lower block feeds the upper output") {
    BlockVec v{CVec::Zero(16), psi};
    const BlockVec hv = hermitrized_apply(op, omega, v);
    const CVec want = omega * psi - ld * psi;
    CHECK((hv.upper - want).norm() < 1e-12);
    CHECK(hv.lower.norm() == 0.0);
  }

  SUBCASE("two applications give the positive-semidefinite product") {
    BlockVec v{psi, CVec::Zero(16)};
    const BlockVec hv = hermitrized_apply(op, omega, v);
    const BlockVec hhv = hermitrized_apply(op, omega, hv);
    CHECK(hhv.lower.norm() < 1e-14);
    const Cplx quad = psi.dot(hhv.upper);
    CHECK(std::abs(quad.imag()) < 1e-10 * std::abs(quad));
    CHECK(quad.real() >= 0.0);
    CHECK(quad.real() == doctest::Approx(hv.lower.squaredNorm()).epsilon(1e-12));
  }

  SUBCASE("an eigenvalue of the generator is a zero singular direction") {
    const auto ed = eig_nonhermitian(ld);
    const Cplx w0 = ed.values[3];
    CMat h2(32, 32);
    for (int c = 0; c < 32; ++c) {
      BlockVec e{CVec::Zero(16), CVec::Zero(16)};
      if (c < 16)
        e.upper[c] = 1.0;
      else
        e.lower[c - 16] = 1.0;
      const BlockVec col = hermitrized_apply(op, w0, e);
      h2.block(0, c, 16, 1) = col.upper;
      h2.block(16, c, 16, 1) = col.lower;
    }
    CHECK((h2 - h2.adjoint()).norm() < 1e-12);
    Eigen::BDCSVD<CMat> svd(h2);
    CHECK(svd.singularValues().minCoeff() < 1e-10);
  }
}

TEST_CASE("optimized moments match the doubled-matrix recursion") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const CMat ld = to_dense(lt);
  const PauliApplier op(lt);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);

  const Cplx omega(-0.3, 0.9);
  KpmParams kpm;
  kpm.n_moments = 64;
  kpm.scale = estimate_scale(lt, FrequencyGrid{-1.0, 1.0, 3, -1.0, 1.0, 3});

  const CVec mu = chebyshev_moments_dense(op, omega, probes.left, probes.right, kpm);
  const CVec ref =
      reference_moments(ld, omega, probes.left, probes.right, kpm.n_moments, kpm.scale);

  const double top = ref.cwiseAbs().maxCoeff();
  for (int m = 0; m < kpm.n_moments; ++m) {
    if (m % 2 == 0) {
      CHECK(std::abs(ref[m]) < 1e-10 * top);   // parity of the doubled operator
      CHECK(mu[m] == Cplx(0.0, 0.0));          // exact zero in the block recursion
    } else {
      CHECK(std::abs(mu[m] - ref[m]) < 1e-12 * std::max(1.0, top));
    }
  }
}

TEST_CASE("single-mode moments match direct 2x2 powers") {
  const Cplx lambda(0.15, -0.35);
  const auto ops = scalar_operator(lambda);
  const PauliApplier op(ops);
  const Cplx omega(0.4, 0.2);
  const double a = 2.0;
  KpmParams kpm;
  kpm.n_moments = 16;
  kpm.scale = a;
  CVec e0 = CVec::Zero(2);
  e0[0] = 1.0;
  const CVec mu = chebyshev_moments_dense(op, omega, e0, e0, kpm);

  const Cplx z = (omega - lambda) / a;
  // T_m of [[0, z], [conj z, 0]] between the two blocks: odd polynomials in
  // the off-diagonal entry
  CHECK(std::abs(mu[1] - std::conj(z)) < 1e-14);
  CHECK(std::abs(mu[3] - (4.0 * std::norm(z) - 3.0) * std::conj(z)) < 1e-13);
  const double r2 = std::norm(z);
  const Cplx t5 = (16.0 * r2 * r2 - 20.0 * r2 + 5.0) * std::conj(z);
  CHECK(std::abs(mu[5] - t5) < 1e-13);
}

TEST_CASE("dense and tensor-network moments agree without truncation") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const PauliApplier op(lt);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);

  std::vector<Eigen::Matrix2cd> right_pairs(p.n_sites, 0.5 * Eigen::Matrix2cd::Identity());
  std::vector<Eigen::Matrix2cd> left_pairs(p.n_sites, Eigen::Matrix2cd::Identity());
  Eigen::Matrix2cd z;
  z << 1.0, 0.0, 0.0, -1.0;
  right_pairs.back() = 0.5 * z;
  left_pairs.back() = z;
  const Mps right = mps_pair_product(right_pairs);
  const Mps left = mps_pair_product(left_pairs);

  KpmParams kpm;
  kpm.n_moments = 64;
  kpm.scale = estimate_scale(lt, FrequencyGrid{-1.0, 1.0, 3, -1.0, 1.0, 3});
  const MpsOptions opt{1 << 12, 0.0};

  for (const Cplx omega : {Cplx(-0.3, 0.9), Cplx(0.1, -0.2)}) {
    const CVec mu_dense = chebyshev_moments_dense(op, omega, probes.left, probes.right, kpm);
    std::vector<BondLogEntry> log;
    const MpsMoments mm = chebyshev_moments_mps(lt, omega, left, right, kpm, opt, &log);
    CHECK((mm.mu - mu_dense).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(mm.trunc_error < 1e-10);
    CHECK(mm.max_bond <= 16);  // cannot exceed the dense rank at four sites
    CHECK(!log.empty());
    CHECK(log.front().step == 1);
  }
}

TEST_CASE("resolvent reconstruction") {
  SUBCASE("symmetric eigenvalue pair cancels at the origin") {
    PauliTerms ops;
    ops.n_sites = 1;
    ops.terms.push_back(make_term(1, 0.5, {{0, 'Z'}}));
    const PauliApplier op(ops);
    CVec psi(2);
    psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    KpmParams kpm;
    kpm.n_moments = 256;
    kpm.scale = 2.0;
    const CVec mu = chebyshev_moments_dense(op, Cplx(0.0, 0.0), psi, psi, kpm);
    CHECK(std::abs(greens_from_moments(mu, kpm.scale)) < 1e-12);
  }

  SUBCASE("isolated mode reproduces the smeared-inverse form") {
    const double e0 = 0.5;
    const auto ops = scalar_operator(Cplx(-e0, 0.0));
    const PauliApplier op(ops);
    CVec e_first = CVec::Zero(2);
    e_first[0] = 1.0;
    KpmParams kpm;
    kpm.n_moments = 512;
    kpm.scale = 1.0;
    const CVec mu = chebyshev_moments_dense(op, Cplx(0.0, 0.0), e_first, e_first, kpm);
    const Cplx g = greens_from_moments(mu, kpm.scale);

    const double sigma = kpm.sigma_scaled() * kpm.scale;
    const double s2 = std::sqrt(2.0 * sigma * sigma);
    const double want = (2.0 / s2) * dawson_large(e0 / s2);
    CHECK(std::abs(g.imag()) < 1e-10);
    CHECK(g.real() == doctest::Approx(want).epsilon(1e-3));
  }

  SUBCASE("smeared inverse error bound away from the origin") {
    for (int n_mom : {128, 512}) {
      KpmParams kpm;
      kpm.n_moments = n_mom;
      kpm.scale = 1.0;
      const double sigma = kpm.sigma_scaled();
      for (double e : {2.0 * sigma, 3.0 * sigma, 8.0 * sigma, 0.3, 0.6, 0.9}) {
        const auto ops = scalar_operator(Cplx(-e, 0.0));
        const PauliApplier op(ops);
        CVec e_first = CVec::Zero(2);
        e_first[0] = 1.0;
        const CVec mu = chebyshev_moments_dense(op, Cplx(0.0, 0.0), e_first, e_first, kpm);
        const double g = greens_from_moments(mu, kpm.scale).real();
        CHECK(std::abs(g - 1.0 / e) <= 3.0 * sigma * sigma / (e * e * e));
      }
    }
  }

  SUBCASE("full model against the directly solved resolvent") {
    const ModelParams p = small_model();
    const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
    const CMat ld = to_dense(lt);
    const auto probes = probe_vectors(p, VectorBasis::Interleaved);
    const Cplx omega(-0.35, 0.6);

    const CVec solved =
        (omega * CMat::Identity(16, 16) - ld).partialPivLu().solve(probes.right);
    const Cplx g_exact = probes.left.dot(solved);
    CHECK(std::abs(g_exact - Cplx(0.145444, 0.299166)) < 2e-6);

    KpmParams kpm;
    kpm.n_moments = 1024;
    kpm.scale = 1.1 * (std::abs(omega) + coeff_l1_norm(lt) + std::abs(lt.shift));
    const PauliApplier op(lt);
    const CVec mu = chebyshev_moments_dense(op, omega, probes.left, probes.right, kpm);
    const Cplx g_kpm = greens_from_moments(mu, kpm.scale);
    CHECK(std::abs(g_kpm - g_exact) < 1e-2 * std::abs(g_exact));
  }
}

TEST_CASE("scale violation aborts with a rescale hint") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const PauliApplier op(lt);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);
  KpmParams kpm;
  kpm.n_moments = 256;
  kpm.scale = 0.2;
  CHECK_THROWS_WITH_AS(
      (void)chebyshev_moments_dense(op, Cplx(0.0, 0.0), probes.left, probes.right, kpm),
      doctest::Contains("scale"), InvariantError);
}

TEST_CASE("zero boundary vectors yield zero moments") {
  const auto ops = scalar_operator(0.3);
  const PauliApplier op(ops);
  KpmParams kpm;
  kpm.n_moments = 32;
  kpm.scale = 1.0;
  const CVec zero = CVec::Zero(2);
  CVec one = CVec::Zero(2);
  one[0] = 1.0;
  CHECK(chebyshev_moments_dense(op, Cplx(0.1, 0.1), one, zero, kpm).norm() == 0.0);
}

TEST_CASE("map of a single mode integrates to its weight over a disk") {
  const Cplx w0(0.1, -0.2);
  const auto ops = scalar_operator(w0);
  CVec e0 = CVec::Zero(2);
  e0[0] = 1.0;

  FrequencyGrid grid;
  grid.re_min = w0.real() - 0.5;
  grid.re_max = w0.real() + 0.5;
  grid.im_min = w0.imag() - 0.5;
  grid.im_max = w0.imag() + 0.5;
  grid.n_re = grid.n_im = 51;
  KpmParams kpm;
  kpm.n_moments = 512;

  const SpectralMap map = spectral_map_dense(ops, e0, e0, grid, kpm);
  CHECK(map.valid(0, 0) == 0);
  CHECK(map.valid(1, 1) == 1);

  const double cell = grid.re_step() * grid.im_step();
  Cplx weight = 0.0;
  for (int j = 0; j < grid.n_im; ++j)
    for (int i = 0; i < grid.n_re; ++i) {
      if (!map.valid(j, i)) continue;
      if (std::abs(grid.node(i, j) - w0) > 0.45) continue;
      weight += map.corr(j, i) * cell;
    }
  CHECK(std::abs(weight - Cplx(1.0, 0.0)) < 0.02);
}

TEST_CASE("map symmetry about the real axis") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);

  FrequencyGrid grid;
  grid.re_min = -0.8;
  grid.re_max = 0.1;
  grid.n_re = 9;
  grid.im_min = -1.8;
  grid.im_max = 1.8;
  grid.n_im = 9;
  KpmParams kpm;
  kpm.n_moments = 128;

  KpmParams direct = kpm;
  direct.use_mirror = false;
  const SpectralMap full = spectral_map_dense(lt, probes.left, probes.right, grid, direct);
  CHECK(full.diag.symmetry_residual >= 0.0);
  CHECK(full.diag.symmetry_residual < 1e-6);

  const double top = full.corr.cwiseAbs().maxCoeff();
  for (int j = 1; j + 1 < grid.n_im; ++j)
    for (int i = 1; i + 1 < grid.n_re; ++i)
      CHECK(std::abs(full.corr(grid.n_im - 1 - j, i) - std::conj(full.corr(j, i))) <
            1e-6 * top);

  SUBCASE("mirror shortcut reproduces the full computation") {
    const SpectralMap half = spectral_map_dense(lt, probes.left, probes.right, grid, kpm);
    CHECK(half.diag.nodes_computed < full.diag.nodes_computed);
    CHECK((half.greens - full.greens).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((half.corr - full.corr).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("peaks sit on generator eigenvalues") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const CMat ld = to_dense(lt);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);

  FrequencyGrid grid;
  grid.re_min = -0.65;
  grid.re_max = 0.05;
  grid.n_re = 15;
  grid.im_min = -2.0;
  grid.im_max = 2.0;
  grid.n_im = 81;
  KpmParams kpm;
  kpm.n_moments = 512;

  const SpectralMap map = spectral_map_dense(lt, probes.left, probes.right, grid, kpm, 2);

  int bi = -1, bj = -1;
  double best = -1.0;
  for (int j = 1; j + 1 < grid.n_im; ++j)
    for (int i = 1; i + 1 < grid.n_re; ++i)
      if (std::abs(map.corr(j, i)) > best) {
        best = std::abs(map.corr(j, i));
        bi = i;
        bj = j;
      }
  REQUIRE(best > 0.0);
  const Cplx peak = grid.node(bi, bj);

  // the dominant modes of this model sit near -0.305 +/- 1.482i
  const auto ed = eig_nonhermitian(ld);
  double dist = 1e9;
  for (Eigen::Index k = 0; k < ed.values.size(); ++k)
    dist = std::min(dist, std::abs(peak - ed.values[k]));
  CHECK(dist <= 1.5 * std::max(grid.re_step(), grid.im_step()));
}

TEST_CASE("doubling the moment count sharpens an isolated peak") {
  const Cplx pole(-0.3, 0.7);
  const auto ops = scalar_operator(pole);
  CVec e0 = CVec::Zero(2);
  e0[0] = 1.0;

  FrequencyGrid grid;
  grid.re_min = pole.real() - 0.02;
  grid.re_max = pole.real() + 0.02;
  grid.im_min = pole.imag() - 0.02;
  grid.im_max = pole.imag() + 0.02;
  grid.n_re = grid.n_im = 3;

  double prev = 0.0;
  for (int n_mom : {128, 256, 512}) {
    KpmParams kpm;
    kpm.n_moments = n_mom;
    kpm.scale = 2.0;
    const SpectralMap map = spectral_map_dense(ops, e0, e0, grid, kpm);
    const double height = std::abs(map.corr(1, 1));
    CHECK(height > prev);
    prev = height;
  }
}

TEST_CASE("tensor-network map matches the dense map") {
  const ModelParams p = small_model();
  const auto lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const auto probes = probe_vectors(p, VectorBasis::Interleaved);

  std::vector<Eigen::Matrix2cd> right_pairs(p.n_sites, 0.5 * Eigen::Matrix2cd::Identity());
  std::vector<Eigen::Matrix2cd> left_pairs(p.n_sites, Eigen::Matrix2cd::Identity());
  Eigen::Matrix2cd z;
  z << 1.0, 0.0, 0.0, -1.0;
  right_pairs.back() = 0.5 * z;
  left_pairs.back() = z;

  FrequencyGrid grid;
  grid.re_min = -0.6;
  grid.re_max = 0.0;
  grid.n_re = 4;
  grid.im_min = -1.6;
  grid.im_max = 1.6;
  grid.n_im = 5;
  KpmParams kpm;
  kpm.n_moments = 64;

  const SpectralMap dense = spectral_map_dense(lt, probes.left, probes.right, grid, kpm);
  const SpectralMap tn = spectral_map_mps(lt, mps_pair_product(left_pairs),
                                          mps_pair_product(right_pairs), grid, kpm,
                                          MpsOptions{1 << 12, 0.0}, 2);
  CHECK((tn.greens - dense.greens).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((tn.corr - dense.corr).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(tn.diag.max_bond > 0);
  CHECK(tn.diag.max_trunc_error < 1e-10);
}

TEST_CASE("grid and parameter validation") {
  FrequencyGrid g;
  g.n_re = 2;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.n_re = 3;
  g.re_min = 1.0;
  g.re_max = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);

  KpmParams kpm;
  kpm.n_moments = 8;
  CHECK_THROWS_AS(kpm.validate(), ConfigError);
}

}  // TEST_SUITE
