// Microbenchmarks for the evaluation paths that dominate fitting time.

#include <benchmark/benchmark.h>

#include <vector>

#include "hotstate/collapsed.hpp"
#include "hotstate/gap_time.hpp"
#include "hotstate/inference.hpp"
#include "hotstate/likelihood.hpp"
#include "hotstate/process_model.hpp"
#include "hotstate/rng.hpp"
#include "hotstate/simulate.hpp"

using namespace hotstate;

namespace {

ModelSpec typical_model() {
  ModelSpec s;
  s.regular_baseline = ConstantBaseline{0.1};
  s.hot_baseline = ProportionalHot{0.7};
  s.beta_regular = {-0.12, 0.3};
  s.tau_dist = HotDurationDist{9.0, 4.5};
  return s;
}

ModelSpec piecewise_model() {
  ModelSpec s;
  s.regular_baseline = PiecewiseConstantBaseline{
      {0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 27.5},
      {0.08, 0.1, 0.12, 0.11, 0.1, 0.09, 0.1}};
  s.hot_baseline = ProportionalHot{0.7};
  s.beta_regular = {-0.12, 0.3};
  s.tau_dist = HotDurationDist{9.0, 4.5};
  return s;
}

Segment typical_segment(std::uint64_t seed) {
  Rng rng(seed);
  Segment seg;
  seg.duration = 45.0;
  seg.covariates = {rng.normal(), rng.normal()};
  seg.events = simulate_constant(0.1, 0.25, 2.0, seg.duration, rng);
  return seg;
}

}  // namespace

static void BM_GapSample(benchmark::State& state) {
  const ChangePointExp d{0.1, 0.45, 2.0};
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(gap_sample(d, rng));
}
BENCHMARK(BM_GapSample);

static void BM_SimulateSegment(benchmark::State& state) {
  Rng rng(2);
  for (auto _ : state) {
    const auto ev = simulate_constant(0.1, 0.45, 2.0, 45.0, rng);
    benchmark::DoNotOptimize(ev.data());
  }
}
BENCHMARK(BM_SimulateSegment);

static void BM_CondLoglik(benchmark::State& state) {
  const auto spec = typical_model();
  const auto seg = typical_segment(3);
  double tau = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cond_loglik(spec, seg, tau));
    tau = tau < 4.0 ? tau + 0.25 : 1.0;  // vary the kink layout a little
  }
}
BENCHMARK(BM_CondLoglik);

static void BM_CondLoglikPiecewise(benchmark::State& state) {
  const auto spec = piecewise_model();
  const auto seg = typical_segment(4);
  double tau = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cond_loglik(spec, seg, tau));
    tau = tau < 4.0 ? tau + 0.25 : 1.0;
  }
}
BENCHMARK(BM_CondLoglikPiecewise);

static void BM_CollapsedStats(benchmark::State& state) {
  const auto spec = typical_model();
  const auto seg = typical_segment(5);
  const detail::CollapsedSegment cs(spec, seg);
  detail::SegTauStats stats;
  stats.resize(cs.reg_pieces(), cs.hot_pieces());
  double tau = 1.0;
  for (auto _ : state) {
    cs.stats(tau, stats);
    benchmark::DoNotOptimize(stats.reg_time.data());
    tau = tau < 4.0 ? tau + 0.25 : 1.0;
  }
}
BENCHMARK(BM_CollapsedStats);

static void BM_CollapsedObjective(benchmark::State& state) {
  // one averaged-statistics objective evaluation, the M-step inner loop
  const auto spec = typical_model();
  const auto seg = typical_segment(6);
  const detail::CollapsedSegment cs(spec, seg);
  detail::SegTauStats stats;
  stats.resize(cs.reg_pieces(), cs.hot_pieces());
  cs.stats(1.5, stats);
  const detail::CollapsedModel cm(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cm.cond(seg.covariates, stats) +
                             cm.tau_term(stats));
  }
}
BENCHMARK(BM_CollapsedObjective);

static void BM_MarginalSegment(benchmark::State& state) {
  const auto spec = typical_model();
  const auto seg = typical_segment(7);
  for (auto _ : state)
    benchmark::DoNotOptimize(marginal_loglik_segment(spec, seg));
}
BENCHMARK(BM_MarginalSegment);

static void BM_TauPosteriorBuild(benchmark::State& state) {
  const auto spec = typical_model();
  const auto seg = typical_segment(8);
  for (auto _ : state) {
    const TauPosterior post(spec, seg, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(post.mean());
  }
}
BENCHMARK(BM_TauPosteriorBuild)->Arg(128)->Arg(512)->Arg(2048);

static void BM_TauPosteriorDraws(benchmark::State& state) {
  const auto spec = typical_model();
  const auto seg = typical_segment(9);
  const TauPosterior post(spec, seg);
  Rng rng(10);
  for (auto _ : state) benchmark::DoNotOptimize(post.sample(rng));
}
BENCHMARK(BM_TauPosteriorDraws);

BENCHMARK_MAIN();
