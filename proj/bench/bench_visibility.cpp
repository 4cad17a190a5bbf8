#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "mrer/grid.hpp"
#include "mrer/mapgen.hpp"
#include "mrer/prediction.hpp"

using namespace mrer;

namespace {

struct Scene {
  PredictionEnsemble ensemble;
  std::vector<Pose> waypoints;
};

// A mid-mission workload: a partially explored floorplan, an oracle ensemble,
// and a handful of plan samples to raycast from.
Scene make_scene(int ensemble_size) {
  const OccupancyGrid truth = generate_map(3, 80, 50);
  OccupancyGrid local(truth.width, truth.height);
  for (int y = 0; y < truth.height; ++y)
    for (int x = 0; x < truth.width / 2; ++x) local.at({x, y}) = truth.at({x, y});

  PredictorKind kind;
  kind.type = PredictorType::Oracle;
  kind.reveal_radius = 8;
  Scene s;
  s.ensemble = predict(kind, local, &truth, ensemble_size, 12345);
  for (int x = 10; x < 46; x += 12)
    for (int y = 10; y < 46; y += 16) {
      const Pose p{x, y};
      if (truth.at(p) == CellState::Free) s.waypoints.push_back(p);
    }
  return s;
}

void bench_serial(benchmark::State& state) {
  const Scene s = make_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sets = member_visibility_serial(s.ensemble, s.waypoints, 20, 250);
    benchmark::DoNotOptimize(sets);
  }
}

void bench_parallel(benchmark::State& state) {
  const Scene s = make_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sets = member_visibility_parallel(s.ensemble, s.waypoints, 20, 250);
    benchmark::DoNotOptimize(sets);
  }
}

}  // namespace

BENCHMARK(bench_serial)->Arg(3)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_parallel)->Arg(3)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
