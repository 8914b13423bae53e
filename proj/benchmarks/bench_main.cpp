#include <benchmark/benchmark.h>

#include "lkpm/nhkpm.hpp"
#include "lkpm/vectorize.hpp"

namespace {

using namespace lkpm;

ModelParams chain(int n_sites) {
  ModelParams p;
  p.n_sites = n_sites;
  p.jx = 0.75;
  p.jy = 0.5;
  p.jz = 0.3;
  p.b = 0.1;
  p.gamma = 0.2;
  return p;
}

// One shifted application of the vectorized generator, the inner loop of
// every dense moment evaluation.  The range argument is the chain length.
void bm_masked_matvec(benchmark::State& state) {
  const ModelParams p = chain(static_cast<int>(state.range(0)));
  const PauliApplier op(vectorized_liouvillian(p, VectorBasis::Interleaved));
  CVec x = CVec::Ones(static_cast<Eigen::Index>(op.dim()));
  x /= x.norm();
  CVec y(x.size());
  const Cplx omega(-0.4, 0.3);
  for (auto _ : state) {
    op.apply_shifted(omega, false, x, y);
    benchmark::DoNotOptimize(y.data());
    std::swap(x, y);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.dim()));
}
BENCHMARK(bm_masked_matvec)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

// Full dense moment run at one frequency node; range is the moment count.
void bm_dense_moments(benchmark::State& state) {
  const ModelParams p = chain(4);
  const PauliTerms lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const PauliApplier op(lt);
  const ProbePair pr = probe_vectors(p, VectorBasis::Interleaved);
  FrequencyGrid grid{-0.9, -0.1, 3, -1.0, 1.0, 3};
  KpmParams kpm;
  kpm.n_moments = static_cast<int>(state.range(0));
  kpm.scale = estimate_scale(lt, grid);
  const Cplx omega(-0.5, 0.4);
  for (auto _ : state) {
    const CVec mu = chebyshev_moments_dense(op, omega, pr.left, pr.right, kpm);
    benchmark::DoNotOptimize(mu.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_dense_moments)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

// Zip-up MPO application with compression, the inner loop of the tensor
// network backend; range is the chain length (doubled internally).
void bm_mps_apply(benchmark::State& state) {
  const ModelParams p = chain(static_cast<int>(state.range(0)));
  const PauliTerms lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  const Mpo op = mpo_shifted(lt, Cplx(-0.4, 0.3), false);
  const MpsOptions opt{64, 1e-10};
  // a couple of applications builds representative bond dimension
  MpsProbePair pr = mps_probe_vectors(p);
  Mps x = apply_mpo_zipup(op, pr.right, opt).out;
  x = apply_mpo_zipup(op, x, opt).out;
  for (auto _ : state) {
    ApplyResult r = apply_mpo_zipup(op, x, opt);
    benchmark::DoNotOptimize(r.out.prefactor);
    state.counters["bond"] = r.out.max_bond();
  }
}
BENCHMARK(bm_mps_apply)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

// Chebyshev moments through the tensor network path at a single node.
void bm_mps_moments(benchmark::State& state) {
  const ModelParams p = chain(4);
  const PauliTerms lt = vectorized_liouvillian(p, VectorBasis::Interleaved);
  FrequencyGrid grid{-0.9, -0.1, 3, -1.0, 1.0, 3};
  KpmParams kpm;
  kpm.n_moments = static_cast<int>(state.range(0));
  kpm.scale = estimate_scale(lt, grid);
  const MpsOptions opt{64, 1e-10};
  const MpsProbePair pr = mps_probe_vectors(p);
  const Cplx omega(-0.5, 0.4);
  for (auto _ : state) {
    const MpsMoments mm = chebyshev_moments_mps(lt, omega, pr.left, pr.right, kpm, opt);
    benchmark::DoNotOptimize(mm.mu.data());
    state.counters["bond"] = mm.max_bond;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_mps_moments)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
