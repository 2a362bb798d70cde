#include <benchmark/benchmark.h>

#include "glovespot/mlp.hpp"
#include "glovespot/rng.hpp"
#include "glovespot/spotter.hpp"

using namespace glovespot;

namespace {

CascadeModel make_cascade(bool with_non_gesture) {
  const std::size_t comm[] = {kFeatureWidth, 44, 10};
  const std::size_t non[] = {kFeatureWidth, 44, 3};
  CascadeModel c{mlp::init_network(comm, 1), std::nullopt};
  if (with_non_gesture) c.non_gesture = mlp::init_network(non, 2);
  c.lag = 3;
  return c;
}

// Per-frame spotter step; range(0) selects the cascade.
void BM_Step(benchmark::State& state) {
  const CascadeModel c = make_cascade(state.range(0) != 0);
  SpotterState s(c);
  Rng rng(7);
  std::vector<SensorFrame> frames(4096);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (double& x : frames[i].sensors) x = rng.uniform();
  }
  std::int64_t t = 0;
  for (auto _ : state) {
    SensorFrame f = frames[static_cast<std::size_t>(t) % frames.size()];
    f.t = t++;
    benchmark::DoNotOptimize(step(s, c, f));
  }
  state.SetLabel(state.range(0) ? "cascade" : "single");
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1);

}  // namespace
