// Microbenchmarks for the estimator kernels: the autocovariance pass
// dominates the replication studies, so its scaling with n, b_n and p is the
// number that matters.

#include <benchmark/benchmark.h>

#include "mcov/autocov.hpp"
#include "mcov/lag_window.hpp"
#include "mcov/linalg.hpp"
#include "mcov/msve.hpp"
#include "mcov/rng.hpp"
#include "mcov/special.hpp"
#include "mcov/var1.hpp"

namespace {

using namespace mcov;

ChainMatrix gaussian_chain(std::size_t n, std::size_t p) {
  RngStream rng(1234, 0);
  std::vector<double> values(n * p);
  for (double& v : values) v = rng.next_gaussian();
  return ChainMatrix(n, p, std::move(values));
}

void BM_AutocovRange(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t p = static_cast<std::size_t>(state.range(1));
  ChainMatrix chain = gaussian_chain(n, p);
  long bn = TruncationRule{}.bn(n);
  for (auto _ : state) {
    auto seq = autocov_range(chain, bn);
    benchmark::DoNotOptimize(seq.nonnegative(0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n) * bn * static_cast<std::int64_t>(p * p));
}
BENCHMARK(BM_AutocovRange)
    ->Args({10000, 5})
    ->Args({100000, 5})
    ->Args({100000, 10})
    ->Args({100000, 50})
    ->Unit(benchmark::kMillisecond);

void BM_MsveWeighting(benchmark::State& state) {
  ChainMatrix chain = gaussian_chain(100000, 10);
  auto seq = autocov_range(chain, TruncationRule{}.bn(100000));
  LagWindow w = LagWindow::tukey_hanning();
  for (auto _ : state) {
    SigmaEstimate est = msve_from_autocov(seq, w);
    benchmark::DoNotOptimize(est.min_eigenvalue);
  }
}
BENCHMARK(BM_MsveWeighting)->Unit(benchmark::kMicrosecond);

void BM_OverlapForm(benchmark::State& state) {
  ChainMatrix chain = gaussian_chain(20000, 5);
  // Bartlett has two nonzero second differences, Tukey-Hanning all b_n.
  LagWindow w = state.range(0) == 0 ? LagWindow::modified_bartlett() : LagWindow::tukey_hanning();
  long bn = TruncationRule{}.bn(20000);
  for (auto _ : state) {
    Matrix m = msve_overlap_form(chain, w, bn);
    benchmark::DoNotOptimize(m.data());
  }
}
BENCHMARK(BM_OverlapForm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EndCorrection(benchmark::State& state) {
  ChainMatrix chain = gaussian_chain(20000, 5);
  LagWindow w = LagWindow::tukey_hanning();
  long bn = TruncationRule{}.bn(20000);
  for (auto _ : state) {
    Matrix m = end_correction(chain, w, bn);
    benchmark::DoNotOptimize(m.data());
  }
}
BENCHMARK(BM_EndCorrection)->Unit(benchmark::kMillisecond);

void BM_Var1Simulate(benchmark::State& state) {
  Var1Spec spec = setting(static_cast<int>(state.range(0)));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    RngStream rng(42, stream++);
    ChainMatrix chain = simulate(spec, 100000, rng);
    benchmark::DoNotOptimize(chain.values().data());
  }
}
BENCHMARK(BM_Var1Simulate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SymEigen(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  RngStream rng(7, 0);
  Matrix b(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) b(i, j) = rng.next_gaussian();
  Matrix a = matmul(b, b.transposed());
  for (std::size_t i = 0; i < p; ++i) a(i, i) += 1.0;
  a.symmetrize();
  for (auto _ : state) {
    auto dec = sym_eigen(a);
    benchmark::DoNotOptimize(dec.eigenvalues.data());
  }
}
BENCHMARK(BM_SymEigen)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_Chi2Quantile(benchmark::State& state) {
  double prob = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi2_quantile(prob, 5));
  }
}
BENCHMARK(BM_Chi2Quantile);

}  // namespace

BENCHMARK_MAIN();
