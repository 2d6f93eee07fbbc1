#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hotstate/gap_time.hpp"
#include "hotstate/process_model.hpp"
#include "hotstate/rng.hpp"
#include "hotstate/simulate.hpp"
#include "support/testutil.hpp"

using namespace hotstate;

namespace {

ModelSpec model_a(double lam0, double nu, std::vector<double> beta = {}) {
  ModelSpec s;
  s.regular_baseline = ConstantBaseline{lam0};
  s.hot_baseline = ProportionalHot{nu};
  s.beta_regular = std::move(beta);
  s.tau_dist = HotDurationDist{9.0, 4.5};
  return s;
}

// gaps between consecutive events, pooled across runs; these follow the
// change-point law once a previous event exists
template <class Gen>
std::vector<double> pooled_gaps(int runs, Gen&& gen) {
  std::vector<double> gaps;
  for (int r = 0; r < runs; ++r) {
    const std::vector<double> ev = gen(r);
    for (std::size_t i = 1; i < ev.size(); ++i)
      gaps.push_back(ev[i] - ev[i - 1]);
  }
  return gaps;
}

struct RecordingObserver : ThinningObserver {
  std::vector<double> times;
  std::vector<bool> hot, acc;
  void candidate(double time, bool h, bool a) override {
    times.push_back(time);
    hot.push_back(h);
    acc.push_back(a);
  }
};

}  // namespace

TEST_CASE("a zero-length window collapses to a poisson process") {
  Rng rng(1);
  const int n = 4000;
  const double lam = 0.1, e = 40.0;
  std::vector<double> counts(n);
  for (auto& c : counts) {
    c = static_cast<double>(simulate_constant(lam, 5.0, 0.0, e, rng).size());
  }
  const double m = testutil::mean(counts);
  const double v = testutil::sample_sd(counts);
  CHECK(std::abs(m - lam * e) < 4.0 * std::sqrt(lam * e / n));
  CHECK(std::abs(v * v - lam * e) < 0.45);
}

TEST_CASE("equal branch rates collapse to a poisson process") {
  Rng rng(2);
  auto gaps = pooled_gaps(400, [&](int) {
    return simulate_constant(0.2, 0.2, 3.0, 200.0, rng);
  });
  REQUIRE(gaps.size() > 5000);
  const double ks = testutil::ks_statistic(
      gaps, [](double y) { return 1.0 - std::exp(-0.2 * y); });
  CHECK(ks < testutil::ks_critical(gaps.size(), 1e-4));
}

TEST_CASE("gaps from the exact engine follow the change-point law") {
  const ChangePointExp law{0.1, 0.45, 2.0};
  Rng rng(3);
  auto gaps = pooled_gaps(300, [&](int) {
    return simulate_constant(law.lambda0, law.lambda1, law.tau, 400.0, rng);
  });
  REQUIRE(gaps.size() > 10000);
  const double ks = testutil::ks_statistic(
      gaps, [&](double y) { return gap_cdf(law, y); });
  CHECK(ks < testutil::ks_critical(gaps.size(), 1e-4));
}

TEST_CASE("thinning and the exact engine agree in distribution") {
  const auto spec = model_a(0.1, std::log(4.5));
  const double tau = 2.0;
  Rng rng_a(4), rng_b(5);
  auto exact = pooled_gaps(120, [&](int) {
    return simulate_constant(0.1, 0.45, tau, 400.0, rng_a);
  });
  auto thinned = pooled_gaps(120, [&](int) {
    return simulate_thinning(spec, {}, tau, 400.0, rng_b);
  });
  REQUIRE(exact.size() > 4000);
  REQUIRE(thinned.size() > 4000);
  const double ks = testutil::ks_two_sample(exact, thinned);
  CHECK(ks < testutil::ks_two_sample_critical(exact.size(), thinned.size(), 1e-4));
}

TEST_CASE("a vanishing hot rate suppresses short gaps") {
  Rng rng(6);
  for (int r = 0; r < 40; ++r) {
    const auto ev = simulate_constant(0.5, 1e-12, 3.0, 300.0, rng);
    for (std::size_t i = 1; i < ev.size(); ++i)
      CHECK(ev[i] - ev[i - 1] > 3.0);
  }
  // same through the thinning engine
  const auto spec = model_a(0.5, std::log(1e-12 / 0.5));
  for (int r = 0; r < 10; ++r) {
    const auto ev = simulate_thinning(spec, {}, 3.0, 300.0, rng);
    for (std::size_t i = 1; i < ev.size(); ++i)
      CHECK(ev[i] - ev[i - 1] > 3.0);
  }
}

TEST_CASE("with a unit hot multiplier the count matches the rate integral") {
  ModelSpec s;
  s.regular_baseline = LogDoubleExpBaseline{std::log(0.1), 1.2, 0.08, 0.9};
  s.hot_baseline = ProportionalHot{0.0};
  s.tau_dist = HotDurationDist{9.0, 4.5};
  const double expected = 6.2575255760848451;  // integrated rate over (0, 45]

  Rng rng(7);
  const int reps = 3000;
  std::vector<double> counts(reps);
  for (auto& c : counts)
    c = static_cast<double>(
        simulate_model_segment(s, {}, 2.0, 45.0, rng).size());
  const double m = testutil::mean(counts);
  CHECK(std::abs(m - expected) < 4.0 * std::sqrt(expected / reps));
  const double v = testutil::sample_sd(counts);
  CHECK(std::abs(v * v - expected) < 0.6);
}

TEST_CASE("the thinning observer sees a consistent candidate stream") {
  const auto spec = model_a(0.12, 0.8);
  const double tau = 2.5, e = 300.0;
  Rng rng(8);
  RecordingObserver obs;
  const auto events = simulate_thinning(spec, {}, tau, e, rng, &obs);
  REQUIRE(!events.empty());

  std::vector<double> accepted;
  double prev = 0.0;
  for (std::size_t i = 0; i < obs.times.size(); ++i) {
    CHECK(obs.times[i] > prev);  // candidates strictly advance
    prev = obs.times[i];
    // the reported state must match the accepted history so far
    CHECK(obs.hot[i] == is_hot(accepted, tau, obs.times[i]));
    if (obs.acc[i]) accepted.push_back(obs.times[i]);
  }
  CHECK(accepted == events);
  for (double t : events) {
    CHECK(t > 0.0);
    CHECK(t <= e);
  }
}

TEST_CASE("simulation survives a tiny observation window") {
  Rng rng(9);
  for (int r = 0; r < 200; ++r) {
    const auto ev = simulate_constant(5.0, 10.0, 1.0, 0.001, rng);
    for (double t : ev) {
      CHECK(t > 0.0);
      CHECK(t <= 0.001);
    }
  }
  const auto spec = model_a(5.0, 0.5);
  const auto ev = simulate_thinning(spec, {}, 1.0, 0.001, rng);
  for (double t : ev) CHECK(t <= 0.001);
}

TEST_CASE("season simulation is reproducible and schedule independent") {
  SimConfig cfg;
  cfg.spec = model_a(0.1, 0.7, {0.3});
  cfg.replications = 3;
  cfg.seed = 99;
  for (int i = 0; i < 25; ++i)
    cfg.plan.push_back({{i, 1}, 40.0 + i, {0.1 * i - 1.0}});

  const auto runs = simulate_season(cfg);
  REQUIRE(runs.size() == 3);
  for (const auto& rep : runs) {
    REQUIRE(rep.size() == cfg.plan.size());
    for (std::size_t j = 0; j < rep.size(); ++j) {
      CHECK(rep[j].id.match_id == cfg.plan[j].id.match_id);
      CHECK(rep[j].duration == cfg.plan[j].duration);
      CHECK(rep[j].covariates == cfg.plan[j].covariates);
      for (double t : rep[j].events) {
        CHECK(t > 0.0);
        CHECK(t <= rep[j].duration);
      }
    }
  }

  const auto again = simulate_season(cfg);
  SimConfig threaded = cfg;
  threaded.threads = 4;
  const auto par = simulate_season(threaded);
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (std::size_t j = 0; j < runs[r].size(); ++j) {
      CHECK(runs[r][j].events == again[r][j].events);
      CHECK(runs[r][j].events == par[r][j].events);
    }

  // replications use distinct randomness
  CHECK(runs[0][0].events != runs[1][0].events);
}

TEST_CASE("a fixed duration changes the gap law as prescribed") {
  // huge fixed window: every later gap is hot, so gaps are Exp(lam1)
  SimConfig cfg;
  cfg.spec = model_a(0.1, std::log(2.0));
  cfg.draw_tau = false;
  cfg.fixed_tau = 1e9;
  cfg.seed = 17;
  for (int i = 0; i < 150; ++i) cfg.plan.push_back({{i, 1}, 400.0, {}});
  const auto hot_runs = simulate_season(cfg);
  std::vector<double> gaps;
  for (const auto& seg : hot_runs[0])
    for (std::size_t i = 1; i < seg.events.size(); ++i)
      gaps.push_back(seg.events[i] - seg.events[i - 1]);
  REQUIRE(gaps.size() > 3000);
  const double ks = testutil::ks_statistic(
      gaps, [](double y) { return 1.0 - std::exp(-0.2 * y); });
  CHECK(ks < testutil::ks_critical(gaps.size(), 1e-4));

  // zero window: plain Poisson at the regular rate
  cfg.fixed_tau = 0.0;
  const auto cold_runs = simulate_season(cfg);
  gaps.clear();
  for (const auto& seg : cold_runs[0])
    for (std::size_t i = 1; i < seg.events.size(); ++i)
      gaps.push_back(seg.events[i] - seg.events[i - 1]);
  const double ks0 = testutil::ks_statistic(
      gaps, [](double y) { return 1.0 - std::exp(-0.1 * y); });
  CHECK(ks0 < testutil::ks_critical(gaps.size(), 1e-4));
}
