#include <doctest.h>

#include <random>

#include "lkpm/model.hpp"
#include "test_helpers.hpp"

using namespace lkpm;
using testutil::site_operator;

namespace {

const ModelParams kP4{4, 0.75, 0.5, 0.3, 0.13, 0.2};

CMat reference_hamiltonian(const ModelParams& p) {
  const int n = p.n_sites;
  CMat h = CMat::Zero(std::size_t{1} << n, std::size_t{1} << n);
  for (int l = 1; l <= n / 2; ++l)
    h -= p.jx * site_operator(n, {{2 * l - 2, 'X'}, {2 * l - 1, 'X'}});
  for (int l = 1; l <= n / 2 - 1; ++l)
    h -= p.jy * site_operator(n, {{2 * l - 1, 'Y'}, {2 * l, 'Y'}});
  for (int l = 1; l <= n; ++l)
    h += p.b * (l - 1) * site_operator(n, {{l - 1, 'Z'}});
  for (int l = 1; l <= n - 1; ++l)
    h += p.jz * site_operator(n, {{l - 1, 'Z'}, {l, 'Z'}});
  return h;
}

// Jump-operator form of the dissipator, term by term.
CMat reference_generator(const ModelParams& p, const CMat& rho) {
  const CMat h = reference_hamiltonian(p);
  CMat out = Cplx(0, -1) * (h * rho - rho * h);
  for (int l = 0; l < p.n_sites; ++l) {
    const CMat z = site_operator(p.n_sites, {{l, 'Z'}});
    out += p.gamma * (z * rho * z - rho);
  }
  return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("hamiltonian matches the explicit dense construction") {
  for (const auto& p : {kP4, ModelParams{2, 0.75, 0.5, 0.0, 0.0, 0.1},
                        ModelParams{6, 1.0, -0.4, 0.2, 0.05, 0.0}}) {
    const CMat h = to_dense(hamiltonian_terms(p));
    CHECK((h - reference_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((h - h.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("generator matches the jump-operator form") {
  std::mt19937_64 rng(211);
  const LindbladDense gen(kP4);
  for (int trial = 0; trial < 10; ++trial) {
    const CMat rho = testutil::random_matrix(16, rng);
    CHECK((gen.apply(rho) - reference_generator(kP4, rho)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("generator preserves trace and hermiticity") {
  std::mt19937_64 rng(223);
  const LindbladDense gen(kP4);
  for (int trial = 0; trial < 25; ++trial) {
    CMat rho = testutil::random_hermitian(16, rng);
    const CMat drho = gen.apply(rho);
    CHECK(std::abs(drho.trace()) < 1e-12 * rho.norm());
    CHECK((drho - drho.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12 * rho.norm());

    // hermiticity covariance on non-hermitian input
    const CMat sigma = testutil::random_matrix(16, rng);
    const CMat a = gen.apply(CMat(sigma.adjoint()));
    const CMat b = gen.apply(sigma).adjoint();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12 * sigma.norm());
  }
}

TEST_CASE("generator commutes with global spin parity") {
  std::mt19937_64 rng(227);
  const LindbladDense gen(kP4);
  const CMat q = to_dense(parity_operator(4));
  CHECK((q * q - CMat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
  for (int trial = 0; trial < 10; ++trial) {
    const CMat rho = testutil::random_matrix(16, rng);
    const CMat lhs = q * gen.apply(rho) * q;
    const CMat rhs = gen.apply(CMat(q * rho * q));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rho.norm());
  }
}

TEST_CASE("both parity sectors of the identity are steady") {
  const LindbladDense gen(kP4);
  const double dim = 16.0;
  const CMat q = to_dense(parity_operator(4));
  const CMat rho_plus = (CMat::Identity(16, 16) + q) / dim;
  const CMat rho_minus = (CMat::Identity(16, 16) - q) / dim;
  CHECK(gen.apply(rho_plus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(gen.apply(rho_minus).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("parameter validation") {
  ModelParams p = kP4;
  p.n_sites = 3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n_sites = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = kP4;
  p.gamma = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_NOTHROW(kP4.validate());
}

}  // TEST_SUITE
