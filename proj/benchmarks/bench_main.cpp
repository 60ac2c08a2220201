#include <benchmark/benchmark.h>

#include <vector>

#include "craftmaps/craftmaps.hpp"

using namespace craftmaps;

static void BM_Fwht(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  for (auto _ : state) {
    fwht_in_place(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(4)->Range(64, 1 << 16);

static void BM_UpProjection(benchmark::State& state) {
  const std::size_t d = 1024, D = static_cast<std::size_t>(state.range(0)), n = 64;
  const bool srht = state.range(1) != 0;
  Matrix X = random_unit_rows(n, d, 3);
  PolyKernelParams params(1, 7);
  if (srht) {
    SrhtRfmModel model = build_srht_rfm(d, D, params, 5);
    for (auto _ : state) benchmark::DoNotOptimize(apply_srht_rfm_batch(model, X).data());
  } else {
    RfmModel model = build_rfm(d, D, params, 5);
    for (auto _ : state) benchmark::DoNotOptimize(apply_rfm_batch(model, X).data());
  }
  state.SetLabel(srht ? "srht" : "dense");
}
BENCHMARK(BM_UpProjection)
    ->ArgsProduct({{1 << 12, 1 << 14}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

static void BM_DownProjection(benchmark::State& state) {
  const std::size_t D = 8192, E = static_cast<std::size_t>(state.range(0)), n = 64;
  const auto kind = static_cast<ProjectorKind>(state.range(1));
  Rng rng(7);
  Matrix Z(n, D);
  for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = rng.normal();
  DownProjector down = build_down_projector(D, E, kind, 9);
  down.materialize();
  for (auto _ : state) benchmark::DoNotOptimize(apply_down_batch(down, Z).data());
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_DownProjection)
    ->ArgsProduct({{256, 1024}, {static_cast<long>(ProjectorKind::kDenseRademacher),
                                 static_cast<long>(ProjectorKind::kSrht)}})
    ->Unit(benchmark::kMillisecond);

static void BM_HessianAccumulate(benchmark::State& state) {
  const std::size_t E = static_cast<std::size_t>(state.range(0)), n = 256;
  Rng rng(11);
  Matrix Z(n, E);
  for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = rng.normal();
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
  CodeBook codebook = make_codebook(3, 15, 13);
  for (auto _ : state) {
    RidgeAccumulator acc(E, codebook);
    acc.accumulate(Z, labels);
    benchmark::DoNotOptimize(acc.gradient().data());
  }
}
BENCHMARK(BM_HessianAccumulate)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
