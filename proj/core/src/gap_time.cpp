#include "hotstate/gap_time.hpp"

#include <cmath>
#include <stdexcept>

#include "hotstate/rng.hpp"

namespace hotstate {

namespace {

void check(const ChangePointExp& d) {
  if (!(d.lambda0 > 0.0) || !(d.lambda1 > 0.0))
    throw std::invalid_argument("ChangePointExp: rates must be > 0");
  if (!(d.tau >= 0.0))
    throw std::invalid_argument("ChangePointExp: tau must be >= 0");
}

}  // namespace

double gap_pdf(const ChangePointExp& d, double y) {
  check(d);
  if (y <= 0.0) return 0.0;
  if (y <= d.tau) return d.lambda1 * std::exp(-d.lambda1 * y);
  return d.lambda0 *
         std::exp(-(d.lambda1 - d.lambda0) * d.tau - d.lambda0 * y);
}

double gap_cdf(const ChangePointExp& d, double y) {
  check(d);
  if (y <= 0.0) return 0.0;
  if (y <= d.tau) return -std::expm1(-d.lambda1 * y);
  return 1.0 - std::exp(-(d.lambda1 - d.lambda0) * d.tau - d.lambda0 * y);
}

double gap_quantile(const ChangePointExp& d, double p) {
  check(d);
  if (!(p >= 0.0) || p >= 1.0)
    throw std::domain_error("gap_quantile: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  const double at_tau = -std::expm1(-d.lambda1 * d.tau);
  if (p <= at_tau) return -std::log1p(-p) / d.lambda1;
  // Invert the second branch: -log(1-p) = (l1-l0)*tau + l0*y.
  return (-std::log1p(-p) - (d.lambda1 - d.lambda0) * d.tau) / d.lambda0;
}

double gap_sample(const ChangePointExp& d, Rng& rng) {
  check(d);
  const double w1 = rng.exponential(d.lambda1);
  if (w1 <= d.tau) return w1;
  return d.tau + rng.exponential(d.lambda0);
}

}  // namespace hotstate
