#include "dcqe/analysis.hpp"
#include "dcqe/coincidence.hpp"
#include "dcqe/event_timeline.hpp"
#include "dcqe/experiment.hpp"
#include "dcqe/photon_source.hpp"
#include "dcqe/quantum_state.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace dcqe;

void BM_RunInterval(benchmark::State& state) {
  BenchConfig bench;
  bench.source.pair_rate = static_cast<double>(state.range(0));
  const TwoPhotonState source = prepare_state(bench.source);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto r = run_interval(source, bench, 0.3, 1.0, seed++);
    benchmark::DoNotOptimize(r.streams);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunInterval)->Arg(10000)->Arg(100000);

void BM_CountPairs(benchmark::State& state) {
  BenchConfig bench;
  bench.source.pair_rate = static_cast<double>(state.range(0));
  bench.detectors.fill({1.0, 350.0, 0.0});
  const auto r = run_interval(prepare_state(bench.source), bench, 0.0, 1.0, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_table(r.streams, bench.coincidence, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountPairs)->Arg(100000);

void BM_FitFringe(benchmark::State& state) {
  std::vector<FringePoint> pts;
  for (int k = 0; k < 40; ++k) {
    const double x = 0.44 * k;
    pts.push_back({x, 2500.0 + 1800.0 * std::cos(2.0 * kPi * x / 4.4 + 0.2) + (k % 3 - 1) * 30.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_fringe(pts));
}
BENCHMARK(BM_FitFringe);

void BM_JointProbability(benchmark::State& state) {
  const TwoPhotonState s = prepare_state(SourceSpec{});
  double angle = 0.0;
  for (auto _ : state) {
    angle += 1e-3;
    benchmark::DoNotOptimize(joint_probability(s, MeasurementSetting(angle, Port::reflected),
                                               MeasurementSetting(0.3, Port::transmitted)));
  }
}
BENCHMARK(BM_JointProbability);

}  // namespace
BENCHMARK_MAIN();
