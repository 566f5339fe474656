// Microbenchmarks for the hot paths: operator assembly + eigendecomposition,
// moment table queries, net forward/backward, one reverse Euler step, and the
// batch metric report. Sizes mirror the 32x32 working regime.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "hedge/drift_net.hpp"
#include "hedge/forward.hpp"
#include "hedge/incidence.hpp"
#include "hedge/metrics.hpp"
#include "hedge/rng.hpp"
#include "hedge/sampler.hpp"
#include "hedge/spectral.hpp"
#include "hedge/trainer.hpp"

namespace {

using namespace hedge;

constexpr std::uint64_t kSeed = 424242;

IncidenceMatrix random_h(int n, int m, std::uint64_t salt) {
  rng::Stream stream(rng::derive(kSeed, "bench/h", salt));
  mat_t e(n, m);
  for (int j = 0; j < m; ++j) {
    bool any = false;
    for (int i = 0; i < n; ++i) {
      e(i, j) = stream.uniform() < 0.35 ? 1.0 : 0.0;
      any = any || e(i, j) > 0.5;
    }
    if (!any) e(static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(n))), j) = 1.0;
  }
  for (int i = 0; i < n; ++i)
    if (e.row(i).sum() == 0.0)
      e(i, static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(m)))) = 1.0;
  return IncidenceMatrix(std::move(e));
}

void bench_eigendecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IncidenceMatrix h = random_h(n, n, 1);
  const NodeLaplacian lv = node_laplacian(h);
  const EdgeLaplacian le = edge_laplacian(h);
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(lv, le));
}
BENCHMARK(bench_eigendecompose)->Arg(16)->Arg(32)->Arg(64);

void bench_moments_query(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IncidenceMatrix h = random_h(n, n, 2);
  const ForwardProcess proc(h, make_default_config(n, n, 0.35));
  double s = 0.0;
  for (auto _ : state) {
    s = s >= 0.98 ? 0.01 : s + 0.013;
    benchmark::DoNotOptimize(proc.moments(s));
  }
}
BENCHMARK(bench_moments_query)->Arg(16)->Arg(32);

void bench_net_forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DriftNet::Config cfg;
  cfg.widths = {1, 16, 16, 1};
  DriftNet net(cfg, rng::derive(kSeed, "bench/net"));
  rng::Stream stream(rng::derive(kSeed, "bench/state"));
  for (double& p : net.params()) p += 0.05 * stream.normal();
  mat_t x(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = stream.normal();
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, 0.4));
}
BENCHMARK(bench_net_forward)->Arg(16)->Arg(32);

void bench_net_backward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DriftNet::Config cfg;
  cfg.widths = {1, 16, 16, 1};
  DriftNet net(cfg, rng::derive(kSeed, "bench/net2"));
  rng::Stream stream(rng::derive(kSeed, "bench/state2"));
  mat_t x(n, n), up(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      x(i, j) = stream.normal();
      up(i, j) = stream.normal();
    }
  std::vector<double> grads(net.param_count(), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.backward(x, 0.4, up, grads));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(bench_net_backward)->Arg(16)->Arg(32);

void bench_train_sample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IncidenceMatrix h = random_h(n, n, 3);
  const ForwardProcess proc(h, make_default_config(n, n, 0.35));
  rng::Stream stream(rng::derive(kSeed, "bench/sample"));
  double s = 0.0;
  for (auto _ : state) {
    s = s >= 0.98 ? 0.01 : s + 0.017;
    benchmark::DoNotOptimize(draw_sample(proc, s, stream));
  }
}
BENCHMARK(bench_train_sample)->Arg(16)->Arg(32);

void bench_generate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DriftNet::Config cfg;
  cfg.widths = {1, 12, 12, 1};
  DriftNet net(cfg, rng::derive(kSeed, "bench/gen/net"));
  const DiffusionConfig dcfg = make_default_config(n, n, 0.35);
  SampleConfig scfg;
  scfg.steps = 64;
  scfg.count = 1;
  std::uint64_t salt = 0;
  for (auto _ : state) {
    scfg.seed = rng::derive(kSeed, "bench/gen", salt++);
    benchmark::DoNotOptimize(generate(net, dcfg, n, n, scfg));
  }
}
BENCHMARK(bench_generate)->Arg(16)->Arg(32);

void bench_evaluate_batches(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<IncidenceMatrix> real, gen;
  for (std::uint64_t k = 0; k < 12; ++k) {
    real.push_back(random_h(n, n, 100 + k));
    gen.push_back(random_h(n, n, 200 + k));
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batches(real, gen));
}
BENCHMARK(bench_evaluate_batches)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
