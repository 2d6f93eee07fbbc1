#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hotstate/gap_time.hpp"
#include "hotstate/rng.hpp"
#include "support/testutil.hpp"

using hotstate::ChangePointExp;

// Closed-form law written out independently: hazard lambda1 on (0,tau],
// lambda0 afterwards.  Gaps are almost surely positive, so the density is
// zero at and below the origin.
namespace {

double ref_pdf(const ChangePointExp& d, double y) {
  if (y <= 0.0) return 0.0;
  if (y <= d.tau) return d.lambda1 * std::exp(-d.lambda1 * y);
  return d.lambda0 *
         std::exp(-d.lambda1 * d.tau - d.lambda0 * (y - d.tau));
}

double ref_cdf(const ChangePointExp& d, double y) {
  if (y <= 0.0) return 0.0;
  if (y <= d.tau) return 1.0 - std::exp(-d.lambda1 * y);
  return 1.0 - std::exp(-d.lambda1 * d.tau - d.lambda0 * (y - d.tau));
}

}  // namespace

TEST_CASE("pdf and cdf match the closed form on both sides of the break") {
  const ChangePointExp d{0.1, 0.25, 2.0};
  for (double y : {0.0, 0.3, 1.0, 1.999, 2.0, 2.001, 3.0, 10.0, 40.0}) {
    CHECK(hotstate::gap_pdf(d, y) == doctest::Approx(ref_pdf(d, y)).epsilon(1e-14));
    CHECK(hotstate::gap_cdf(d, y) == doctest::Approx(ref_cdf(d, y)).epsilon(1e-14));
  }
  CHECK(hotstate::gap_pdf(d, -1.0) == 0.0);
  CHECK(hotstate::gap_cdf(d, -1.0) == 0.0);
  // frozen spot values
  CHECK(hotstate::gap_pdf(d, 1.0) ==
        doctest::Approx(0.19470019576785122).epsilon(1e-14));
  CHECK(hotstate::gap_pdf(d, 3.0) ==
        doctest::Approx(0.054881163609402635).epsilon(1e-14));
  CHECK(hotstate::gap_cdf(d, 3.0) ==
        doctest::Approx(0.45118836390597365).epsilon(1e-14));
}

TEST_CASE("tau = 0 and equal rates both reduce to a plain exponential") {
  const ChangePointExp flat{0.3, 0.9, 0.0};
  const ChangePointExp equal{0.3, 0.3, 5.0};
  for (double y : {0.1, 1.0, 4.9, 5.1, 12.0}) {
    const double exp_pdf = 0.3 * std::exp(-0.3 * y);
    CHECK(hotstate::gap_pdf(flat, y) == doctest::Approx(exp_pdf).epsilon(1e-14));
    CHECK(hotstate::gap_pdf(equal, y) == doctest::Approx(exp_pdf).epsilon(1e-14));
    CHECK(hotstate::gap_cdf(flat, y) ==
          doctest::Approx(1.0 - std::exp(-0.3 * y)).epsilon(1e-14));
    CHECK(hotstate::gap_cdf(equal, y) ==
          doctest::Approx(1.0 - std::exp(-0.3 * y)).epsilon(1e-14));
  }
}

TEST_CASE("cdf is continuous at the break and the pdf integrates to one") {
  hotstate::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const ChangePointExp d{0.05 + 2.0 * rng.uniform(),
                           0.05 + 2.0 * rng.uniform(), 4.0 * rng.uniform()};
    const double eps = 1e-9;
    CHECK(std::abs(hotstate::gap_cdf(d, d.tau + eps) -
                   hotstate::gap_cdf(d, d.tau)) < 1e-8);
    // piecewise trapezoid integration, fine grid on each smooth side; the
    // left endpoint of each piece sits one ulp inside it so the endpoint
    // evaluation takes the correct branch of the discontinuous density
    double total = 0.0;
    auto integrate = [&](double a, double b, int n) {
      double acc = 0.5 * (ref_pdf(d, a) + ref_pdf(d, b));
      for (int i = 1; i < n; ++i)
        acc += ref_pdf(d, a + (b - a) * i / n);
      return acc * (b - a) / n;
    };
    const double far = d.tau + 40.0 / d.lambda0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (d.tau > 0.0)
      total += integrate(std::nextafter(0.0, inf), d.tau, 20000);
    total += integrate(std::nextafter(d.tau, inf), far, 40000);
    total += 1.0 - ref_cdf(d, far);  // analytic tail remainder
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    // and the library cdf agrees with the accumulated density
    CHECK(hotstate::gap_cdf(d, far) == doctest::Approx(ref_cdf(d, far)).epsilon(1e-12));
  }
}

TEST_CASE("quantile inverts the cdf across the break") {
  const ChangePointExp d{0.08, 0.6, 1.7};
  for (double p : {1e-6, 0.01, 0.2, 0.5, ref_cdf(d, 1.7), 0.8, 0.99, 0.999999}) {
    const double y = hotstate::gap_quantile(d, p);
    CHECK(hotstate::gap_cdf(d, y) == doctest::Approx(p).epsilon(1e-11));
  }
  CHECK(hotstate::gap_quantile(d, 0.0) == 0.0);
}

TEST_CASE("sampling follows the law") {
  const ChangePointExp d{0.12, 0.5, 2.5};
  hotstate::Rng rng(42);
  std::vector<double> sample(20000);
  for (auto& y : sample) y = hotstate::gap_sample(d, rng);
  const double ks = testutil::ks_statistic(
      sample, [&](double y) { return ref_cdf(d, y); });
  CHECK(ks < testutil::ks_critical(sample.size(), 1e-4));
}

TEST_CASE("sampling is a deterministic function of the stream") {
  const ChangePointExp d{0.12, 0.5, 2.5};
  hotstate::Rng a(9), b(9);
  for (int i = 0; i < 100; ++i)
    CHECK(hotstate::gap_sample(d, a) == hotstate::gap_sample(d, b));
}
