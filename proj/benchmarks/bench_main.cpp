#include <benchmark/benchmark.h>

#include <random>

#include "torsoseg/components.hpp"
#include "torsoseg/metrics.hpp"
#include "torsoseg/postproc.hpp"
#include "torsoseg/tiler.hpp"

using namespace torsoseg;

namespace {

Mask noise_mask(std::int64_t n, double density, std::uint64_t seed) {
  Mask m(GridSpec::axis_aligned({n, n, n}, Vec3(1.4, 1.4, 3.0)));
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(density);
  for (auto& v : m.values()) v = b(rng);
  return m;
}

void BM_ConnectedComponents(benchmark::State& state) {
  const auto m = noise_mask(state.range(0), 0.5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(connected_components(m, Connectivity::corners));
  state.SetItemsProcessed(state.iterations() * m.size());
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Assd(benchmark::State& state) {
  const auto n = state.range(0);
  Mask a(GridSpec::axis_aligned({n, n, n}, Vec3(1.4, 1.4, 3.0))), b = a;
  for (std::int64_t z = n / 4; z < 3 * n / 4; ++z)
    for (std::int64_t y = n / 4; y < 3 * n / 4; ++y)
      for (std::int64_t x = n / 4; x < 3 * n / 4; ++x) {
        a(x, y, z) = 1;
        b(x + 1, y, z) = 1;
      }
  for (auto _ : state) benchmark::DoNotOptimize(assd(a, b));
}
BENCHMARK(BM_Assd)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FilterSmallComponents(benchmark::State& state) {
  const auto n = state.range(0);
  LabelMap l(GridSpec::axis_aligned({n, n, n}, Vec3(1.5, 1.5, 3.0)));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cls(1, 71), speck(0, 99);
  for (std::int64_t i = 0; i < l.size(); ++i) {
    const auto p = l.unravel(std::size_t(i));
    l[std::size_t(i)] = speck(rng) == 0 ? cls(rng) : 1 + std::int32_t((p[0] / 16 + 4 * (p[1] / 16) + 16 * (p[2] / 16)) % 71);
  }
  for (auto _ : state) benchmark::DoNotOptimize(filter_small_components(l, builtin_schema()));
  state.SetItemsProcessed(state.iterations() * l.size());
}
BENCHMARK(BM_FilterSmallComponents)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  Image img(GridSpec::axis_aligned({128, 128, 96}, Vec3::Ones()));
  for (std::int64_t i = 0; i < img.size(); ++i) img[std::size_t(i)] = float(i % 13) / 13.0f;
  const auto plan = plan_tiles(img.shape(), {64, 64, 32});
  auto oracle = threshold_oracle(0.5f);
  FusionConfig cfg;
  cfg.precision = state.range(0) ? AccumulatorPrecision::f16 : AccumulatorPrecision::f32;
  for (auto _ : state) benchmark::DoNotOptimize(fuse(plan, img, *oracle, cfg));
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_Fuse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  std::vector<double> v(50);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.8, 0.1);
  for (auto& x : v) x = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(v, 10000, 0.95, 1));
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
