#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hotstate/analytics.hpp"
#include "hotstate/process_model.hpp"
#include "hotstate/rng.hpp"
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

Segment make_segment(double duration, std::vector<double> events,
                     std::vector<double> z = {}) {
  Segment seg;
  seg.duration = duration;
  seg.events = std::move(events);
  seg.covariates = std::move(z);
  return seg;
}

std::vector<double> make_grid(double from, double to, double step) {
  std::vector<double> g;
  for (double u = from; u <= to + 1e-12; u += step) g.push_back(u);
  return g;
}

}  // namespace

TEST_CASE("cluster sizes split at gaps above the threshold") {
  const auto pmf = cluster_pmf(std::vector<double>{1.0, 1.5, 10.0}, 0.5);
  REQUIRE(pmf.pmf.size() == 2);
  CHECK(pmf.pmf.at(1) == doctest::Approx(0.5));
  CHECK(pmf.pmf.at(2) == doctest::Approx(0.5));

  // a gap exactly at the threshold still chains
  const auto chain = cluster_pmf(std::vector<double>{1.0, 2.0, 3.0}, 1.0);
  REQUIRE(chain.pmf.size() == 1);
  CHECK(chain.pmf.at(3) == doctest::Approx(1.0));

  CHECK(cluster_pmf(std::vector<double>{}, 1.0).pmf.empty());
  CHECK_THROWS_AS(cluster_pmf(std::vector<double>{1.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("clusters never span segment boundaries") {
  std::vector<Segment> segs{make_segment(45.0, {44.9}),
                            make_segment(45.0, {0.1})};
  const auto pmf = cluster_pmf(segs, 3.0);
  REQUIRE(pmf.pmf.size() == 1);
  CHECK(pmf.pmf.at(1) == doctest::Approx(1.0));

  std::vector<Segment> pooled{make_segment(45.0, {1.0, 1.5}),
                              make_segment(45.0, {2.0, 2.5}),
                              make_segment(45.0, {30.0})};
  const auto p2 = cluster_pmf(pooled, 1.0);
  CHECK(p2.pmf.at(2) == doctest::Approx(2.0 / 3.0));
  CHECK(p2.pmf.at(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("prediction without history stays on the regular branch") {
  const auto s = model_a(0.1, 0.7, {0.5});
  const auto hist = make_segment(30.0, {}, {0.4});
  const auto grid = make_grid(1.0, 30.0, 1.0);
  const auto curve = predict_intensity(s, hist, 12.0, grid);
  const double expect = 0.1 * std::exp(0.5 * 0.4);
  for (double v : curve.intensity)
    CHECK(v == doctest::Approx(expect).epsilon(1e-13));
  CHECK(curve.first_predicted == 12);  // first grid point beyond u = 12
  CHECK(curve.grid[curve.first_predicted] == doctest::Approx(13.0));
}

TEST_CASE("a point-mass duration switches branches exactly at the window edge") {
  const auto s = model_a(0.1, 0.7);
  const auto hist = make_segment(30.0, {10.0});
  const std::vector<double> grid{5.0, 10.0, 10.5, 12.0, 12.001, 20.0};
  const auto curve = predict_intensity(s, hist, 10.0, grid, 2.0);
  const double hot = 0.1 * std::exp(0.7);
  CHECK(curve.intensity[0] == doctest::Approx(0.1));
  CHECK(curve.intensity[1] == doctest::Approx(0.1));  // left limit at the event
  CHECK(curve.intensity[2] == doctest::Approx(hot));
  CHECK(curve.intensity[3] == doctest::Approx(hot));  // u - 10 = tau inclusive
  CHECK(curve.intensity[4] == doctest::Approx(0.1));
  CHECK(curve.intensity[5] == doctest::Approx(0.1));
  CHECK(curve.first_predicted == 2);
}

TEST_CASE("predictive mixture weighs branches by the duration survival") {
  const auto s = model_a(0.1, 0.7);
  const auto hist = make_segment(30.0, {10.0});
  const auto grid = make_grid(10.5, 29.5, 0.5);
  const auto curve = predict_intensity(s, hist, 10.0, grid);

  // one event at the query time carries no duration information, so the
  // mixture weight is the prior survival of the elapsed time
  Rng rng(55);
  const int n = 200000;
  const double hot = 0.1 * std::exp(0.7);
  std::vector<double> taus(n);
  for (auto& t : taus) t = rng.gamma(9.0, 4.5);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double thr = grid[i] - 10.0;
    double acc = 0.0;
    for (double t : taus) acc += (thr <= t ? hot : 0.1);
    const double mc = acc / n;
    const double se = 0.5 * (hot - 0.1) / std::sqrt(double(n));
    CHECK(std::abs(curve.intensity[i] - mc) < 4.0 * se + 1e-12);
  }

  // and the curve decays monotonically to the regular branch
  for (std::size_t i = 1; i < curve.intensity.size(); ++i)
    CHECK(curve.intensity[i] <= curve.intensity[i - 1] + 1e-12);
  CHECK(curve.intensity.back() ==
        doctest::Approx(0.1 + (hot - 0.1) * s.tau_dist.survival(19.5))
            .epsilon(1e-9));
}

TEST_CASE("the realized part of the curve ignores later observations") {
  const auto s = model_a(0.1, 0.7);
  const auto grid = make_grid(0.5, 19.5, 0.25);
  const auto early = predict_intensity(
      s, make_segment(30.0, {10.0, 15.0}), 16.0, grid);
  const auto late = predict_intensity(
      s, make_segment(30.0, {10.0, 15.0, 18.0}), 19.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 16.0)
      CHECK(early.intensity[i] ==
            doctest::Approx(late.intensity[i]).epsilon(1e-12));
  }
}

TEST_CASE("prediction validates its inputs") {
  const auto s = model_a(0.1, 0.7);
  const auto hist = make_segment(30.0, {10.0});
  CHECK_THROWS_AS(predict_intensity(s, hist, 9.0, {5.0}),
                  std::invalid_argument);  // event after the query
  CHECK_THROWS_AS(predict_intensity(s, hist, 31.0, {5.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_intensity(s, hist, 12.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_intensity(s, hist, 12.0, {5.0, 35.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict_intensity(s, hist, 12.0, {5.0, 5.0}),
                  std::invalid_argument);
}

TEST_CASE("season summaries aggregate on the match clock") {
  std::vector<std::vector<Segment>> reps(2);
  Segment a = make_segment(30.0, {1.0});
  a.id = {1, 1};
  Segment b = make_segment(20.0, {5.0, 6.0});
  b.id = {1, 2};
  reps[0] = {a, b};
  Segment c = make_segment(40.0, {2.0, 3.0});
  c.id = {7, 1};
  reps[1] = {c};

  const auto summary = season_summaries(reps);
  REQUIRE(summary.metrics.size() == 3);
  const auto& per_match = summary.metrics[0];
  const auto& per_segment = summary.metrics[1];
  const auto& first10 = summary.metrics[2];

  CHECK(per_match.name == "events_per_match");
  CHECK(per_match.mean == doctest::Approx(2.5));
  CHECK(per_match.lo == doctest::Approx(2.025));
  CHECK(per_match.hi == doctest::Approx(2.975));

  CHECK(per_segment.name == "events_per_segment");
  CHECK(per_segment.mean == doctest::Approx(1.75));
  CHECK(per_segment.lo == doctest::Approx(1.5125));
  CHECK(per_segment.hi == doctest::Approx(1.9875));

  // second segment of match 1 starts at clock 30, so its events land at
  // match minutes 35 and 36, outside the first ten
  CHECK(first10.name == "first10_per_match");
  CHECK(first10.mean == doctest::Approx(1.5));
  CHECK(first10.lo == doctest::Approx(1.025));
  CHECK(first10.hi == doctest::Approx(1.975));

  CHECK_THROWS_AS(season_summaries({}), std::invalid_argument);
}
