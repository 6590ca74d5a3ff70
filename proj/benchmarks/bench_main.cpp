#include <benchmark/benchmark.h>

#include <vector>

#include "pgpe/harness.hpp"
#include "pgpe/objectives.hpp"
#include "pgpe/random.hpp"
#include "pgpe/sampling.hpp"
#include "pgpe/update_rules.hpp"

namespace {

using namespace pgpe;

void BM_Mirror(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> eps(1024);
  for (auto& e : eps) e = rng.gaussian();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mirror(eps[i++ & 1023], kMedianDeviationRatio));
  }
}
BENCHMARK(BM_Mirror);

void BM_MakeQuad(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Hypothesis hyp = Hypothesis::isotropic(Vector(dim, 0.5), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(make_quad(rng, hyp));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MakeQuad)->Arg(10)->Arg(100)->Arg(1000);

void BM_VariantStep(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  constexpr std::size_t kDim = 100;
  Rng rng(3);
  Objective objective(ObjectiveKind::rastrigin, kDim);
  const RewardFn reward = [&](std::span<const double> theta) { return objective.reward(theta); };
  MetaParams meta;
  meta.variant = variant;
  meta.alpha_mu = 1e-4;
  meta.alpha_sigma = 1e-4;
  Hypothesis hyp = Hypothesis::isotropic(Vector(kDim, 1.0), 1.0);
  BaselineState baseline(BaselineConfig{});
  for (auto _ : state) {
    const UpdateReport rep = variant_step(hyp, rng, reward, baseline, meta);
    hyp = apply_update(hyp, rep, meta);
  }
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_VariantStep)->DenseRange(0, 4);

void BM_Rastrigin(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x(dim, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(rastrigin_eval(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rastrigin)->Arg(10)->Arg(1000);

void BM_RunSingle(benchmark::State& state) {
  RunConfig c = RunConfig::defaults_for(ObjectiveKind::rastrigin, 10);
  c.meta.variant = Variant::supsys;
  c.meta.alpha_mu = 0.003;
  c.meta.alpha_sigma = 0.003;
  c.max_evaluations = 10000;
  std::size_t run = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_single(c, run++, false));
}
BENCHMARK(BM_RunSingle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
