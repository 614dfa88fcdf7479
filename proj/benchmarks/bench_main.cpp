#include <benchmark/benchmark.h>

#include <cstddef>

#include "cxshrink/cmatrix.hpp"
#include "cxshrink/eigen.hpp"
#include "cxshrink/estimators.hpp"
#include "cxshrink/harness.hpp"
#include "cxshrink/risk.hpp"
#include "cxshrink/rng.hpp"
#include "cxshrink/sampling.hpp"

using namespace cxshrink;

namespace {

CMatrix random_hpd(std::size_t dim, std::uint64_t stream) {
  CounterRng rng({987654321, stream});
  CMatrix b = sample_std_cnormal(dim, dim, rng);
  return (CMatrix::identity(dim) + (b * b.adjoint()) * (0.5 / dim))
      .hermitized();
}

void bm_herm_eigen(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const CMatrix a = random_hpd(dim, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(herm_eigen(a));
  }
}
BENCHMARK(bm_herm_eigen)->Arg(4)->Arg(16)->Arg(64);

void bm_sim_diag(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const CMatrix w = random_hpd(dim, 2);
  const CMatrix s = random_hpd(dim, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim_diag(w, s));
  }
}
BENCHMARK(bm_sim_diag)->Arg(4)->Arg(16);

void bm_sample_cwishart(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const CMatrix sigma = random_hpd(p, 4);
  CounterRng rng({13579, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_cwishart(sigma, 2 * p + 4, rng));
  }
}
BENCHMARK(bm_sample_cwishart)->Arg(2)->Arg(8);

void bm_ure_unknown(benchmark::State& state) {
  const std::size_t m = 6, p = 2, n = 10;
  CounterRng rng({24680, 0});
  CMatrix z = sample_std_cnormal(m, p, rng);
  z(0, 0) += cxd{4.0, 0.0};
  z(1, 1) += cxd{2.0, 0.0};
  const CMatrix s = sample_cwishart(CMatrix::identity(p), n, rng);
  const ShrinkageProfile prof = make_profile(EstimatorKind::UnknownAs, m, p, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ure_unknown(z, s, n, prof));
  }
}
BENCHMARK(bm_ure_unknown);

void bm_run_experiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.m = 4;
  cfg.p = 2;
  cfg.n = 8;
  cfg.sigma = CMatrix::identity(2);
  cfg.k = CMatrix::identity(4);
  cfg.estimators = {estimator_spec_from_name("unknown_em")};
  cfg.reps = 200;
  cfg.seed = 11223344;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg));
  }
}
BENCHMARK(bm_run_experiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
