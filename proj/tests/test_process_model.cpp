#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

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

}  // namespace

TEST_CASE("hot timeline merges overlapping windows and clips at the horizon") {
  CHECK(hot_timeline({}, 2.0, 40.0).empty());

  auto one = hot_timeline({10.0}, 2.0, 40.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].lo == 10.0);
  CHECK(one[0].hi == 12.0);

  // event at 11 lands inside the first window and extends it
  auto merged = hot_timeline({10.0, 11.0, 20.0}, 2.0, 21.0);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].lo == 10.0);
  CHECK(merged[0].hi == 13.0);
  CHECK(merged[1].lo == 20.0);
  CHECK(merged[1].hi == 21.0);

  CHECK(hot_timeline({10.0}, 0.0, 40.0).empty());
}

TEST_CASE("hot state uses the left limit") {
  const std::vector<double> ev{10.0, 11.0};
  CHECK(!is_hot(ev, 2.0, 10.0));   // nothing strictly before 10
  CHECK(is_hot(ev, 2.0, 10.5));
  CHECK(is_hot(ev, 2.0, 11.0));    // gap to the event at 10 is exactly 1
  CHECK(is_hot(ev, 2.0, 13.0));    // t - 11 = 2 = tau still inside
  CHECK(!is_hot(ev, 2.0, 13.0001));
  CHECK(!is_hot(ev, 1.0 - 1e-12, 11.0));
}

TEST_CASE("branch intensities with covariates match frozen values") {
  const auto s = model_a(0.1, 0.7, {-0.12, 0.3});
  const std::vector<double> z{1.0, -0.4};
  CHECK(regular_intensity(s, z, 5.0) ==
        doctest::Approx(0.078662786106655341).epsilon(1e-14));
  CHECK(hot_intensity(s, z, 5.0) ==
        doctest::Approx(0.15840739849944818).epsilon(1e-14));
  const auto plain = model_a(0.1, 0.7);
  CHECK(hot_intensity(plain, {}, 0.0) ==
        doctest::Approx(0.20137527074704765).epsilon(1e-14));
  CHECK(covariate_multiplier({-0.12, 0.3}, z) ==
        doctest::Approx(0.78662786106655341).epsilon(1e-14));
  CHECK_THROWS_AS(covariate_multiplier({-0.12}, z), std::invalid_argument);
}

TEST_CASE("intensity at a time dispatches on the hot state") {
  const auto s = model_a(0.1, 0.7);
  Segment seg;
  seg.duration = 40.0;
  seg.events = {10.0, 11.0};
  CHECK(intensity_at(s, seg, 2.0, 10.0) == doctest::Approx(0.1));
  CHECK(intensity_at(s, seg, 2.0, 10.5) ==
        doctest::Approx(0.20137527074704765).epsilon(1e-14));
  CHECK(intensity_at(s, seg, 2.0, 20.0) == doctest::Approx(0.1));
}

TEST_CASE("cumulative intensity splits exposure between the branches") {
  const auto s = model_a(0.1, 0.7);
  Segment seg;
  seg.duration = 21.0;
  seg.events = {10.0, 11.0, 20.0};
  // hot exposure (10,13] and (20,21]: 4 minutes of 21
  CHECK(cumulative_intensity(s, seg, 2.0, 0.0, 21.0) ==
        doctest::Approx(2.5055010829881906).epsilon(1e-13));
  // eventless window is purely regular
  Segment empty;
  empty.duration = 40.0;
  CHECK(cumulative_intensity(s, empty, 2.0, 0.0, 40.0) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(cumulative_intensity(s, seg, 2.0, 5.0, 5.0) == 0.0);
  // additivity over a split point inside a hot window
  const double whole = cumulative_intensity(s, seg, 2.0, 0.0, 21.0);
  const double split = cumulative_intensity(s, seg, 2.0, 0.0, 11.5) +
                       cumulative_intensity(s, seg, 2.0, 11.5, 21.0);
  CHECK(whole == doctest::Approx(split).epsilon(1e-13));
}

TEST_CASE("log double exponential baseline: rate, integral, supremum") {
  const LogDoubleExpBaseline b{std::log(0.1), 1.2, 0.08, 0.9};
  const BaselineSpec spec = b;
  CHECK(baseline_rate(spec, 5.0) ==
        doctest::Approx(0.22057183968509513).epsilon(1e-14));
  CHECK(baseline_integral(spec, 0.0, 45.0) ==
        doctest::Approx(6.2575255760848451).epsilon(1e-9));
  CHECK(baseline_integral(spec, 3.0, 17.0) ==
        doctest::Approx(2.4912125963741297).epsilon(1e-9));
  // interior peak at t* ~ 2.95, then decreasing
  CHECK(baseline_sup(spec, 0.0, 45.0) ==
        doctest::Approx(0.23711576336057451).epsilon(1e-9));
  CHECK(baseline_sup(spec, 10.0, 45.0) ==
        doctest::Approx(0.17143717126308542).epsilon(1e-12));
  // sup dominates a dense grid
  double grid_max = 0.0;
  for (int i = 0; i <= 4500; ++i)
    grid_max = std::max(grid_max, baseline_rate(spec, 0.01 * i));
  CHECK(baseline_sup(spec, 0.0, 45.0) >= grid_max - 1e-12);
}

TEST_CASE("piecewise baseline is right continuous and extends past the last cut") {
  const PiecewiseConstantBaseline pw{{0.0, 3.0, 6.0}, {0.1, 0.25, 0.15}};
  const BaselineSpec spec = pw;
  CHECK(baseline_rate(spec, 0.0) == 0.1);
  CHECK(baseline_rate(spec, 2.999) == 0.1);
  CHECK(baseline_rate(spec, 3.0) == 0.25);
  CHECK(baseline_rate(spec, 100.0) == 0.15);
  CHECK(baseline_integral(spec, 1.0, 8.0) ==
        doctest::Approx(0.2 + 0.75 + 0.3).epsilon(1e-14));
  CHECK(baseline_sup(spec, 0.0, 45.0) == 0.25);
  CHECK(baseline_sup(spec, 4.0, 5.0) == 0.25);
  CHECK(baseline_sup(spec, 7.0, 45.0) == 0.15);
}

TEST_CASE("duration law moments and distribution functions") {
  const HotDurationDist d{9.0, 4.5};
  const auto [m, sd] = gamma_moments(d);
  CHECK(m == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sd == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(d.mean() == doctest::Approx(2.0));
  CHECK(d.sd() == doctest::Approx(2.0 / 3.0));
  CHECK(d.pdf(2.0) == doctest::Approx(0.59290038004285205).epsilon(1e-12));
  CHECK(d.log_pdf(2.0) ==
        doctest::Approx(-0.52272888727922109).epsilon(1e-12));
  CHECK(d.cdf(2.0) == doctest::Approx(0.54434739567758127).epsilon(1e-12));
  CHECK(d.cdf(1.0) == doctest::Approx(0.04025731248203771).epsilon(1e-12));
  CHECK(d.survival(3.0) ==
        doctest::Approx(0.078995489772178209).epsilon(1e-12));
  CHECK(d.quantile(0.3) ==
        doctest::Approx(1.6044291491400617).epsilon(1e-10));
  CHECK(d.cdf(d.quantile(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(d.survival(d.quantile_upper(0.05)) ==
        doctest::Approx(0.05).epsilon(1e-12));

  const HotDurationDist unit{1.0, 1.0};
  const auto [m1, sd1] = gamma_moments(unit);
  CHECK(m1 == doctest::Approx(1.0));
  CHECK(sd1 == doctest::Approx(1.0));

  const HotDurationDist near{9.46, 4.81};
  const auto [m2, sd2] = gamma_moments(near);
  CHECK(m2 == doctest::Approx(9.46 / 4.81).epsilon(1e-14));
  CHECK(sd2 == doctest::Approx(std::sqrt(9.46) / 4.81).epsilon(1e-14));
}

TEST_CASE("validation rejects malformed components") {
  CHECK_THROWS_AS(validate(BaselineSpec(ConstantBaseline{-0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      validate(BaselineSpec(PiecewiseConstantBaseline{{1.0, 3.0}, {0.1, 0.2}})),
      std::invalid_argument);  // cuts must start at 0
  CHECK_THROWS_AS(
      validate(BaselineSpec(PiecewiseConstantBaseline{{0.0, 3.0}, {0.1}})),
      std::invalid_argument);  // level count mismatch
  CHECK_THROWS_AS(
      validate(BaselineSpec(LogDoubleExpBaseline{0.0, 0.1, -0.5, 1.0})),
      std::invalid_argument);
  CHECK_THROWS_AS(validate(HotDurationDist{0.0, 4.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate(HotDurationDist{9.0, -1.0}), std::invalid_argument);

  Segment bad;
  bad.duration = 10.0;
  bad.events = {3.0, 2.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.events = {3.0, 11.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.events = {0.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.events = {3.0, 3.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  auto spec = model_a(0.1, 0.7);
  CHECK_NOTHROW(validate(spec));
  CHECK(proportional_hot(spec));
  spec.hot_baseline = ConstantBaseline{0.2};
  CHECK(!proportional_hot(spec));
  CHECK_NOTHROW(validate(spec));
  spec.beta_hot = std::vector<double>{0.1};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);  // beta size mismatch
}

TEST_CASE("distinct hot branch uses its own baseline and coefficients") {
  ModelSpec s;
  s.regular_baseline = PiecewiseConstantBaseline{{0.0, 3.0, 6.0}, {0.1, 0.2, 0.15}};
  s.hot_baseline = PiecewiseConstantBaseline{{0.0, 5.0}, {0.3, 0.25}};
  s.beta_regular = {-0.1};
  s.beta_hot = std::vector<double>{0.2};
  s.tau_dist = HotDurationDist{9.0, 4.5};
  validate(s);
  const std::vector<double> z{0.5};
  CHECK(regular_intensity(s, z, 4.0) ==
        doctest::Approx(0.2 * std::exp(-0.05)).epsilon(1e-14));
  CHECK(hot_intensity(s, z, 4.0) ==
        doctest::Approx(0.3 * std::exp(0.1)).epsilon(1e-14));
  CHECK(hot_intensity(s, z, 6.0) ==
        doctest::Approx(0.25 * std::exp(0.1)).epsilon(1e-14));
}
