#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "hotstate/errors.hpp"
#include "hotstate/inference.hpp"
#include "hotstate/likelihood.hpp"

namespace hotstate {

TauPosterior::TauPosterior(const ModelSpec& spec, const Segment& seg,
                           int grid_cells)
    : prior_(spec.tau_dist) {
  validate(spec);
  validate(prior_);
  if (grid_cells < 8)
    throw std::invalid_argument("TauPosterior: grid_cells must be >= 8");

  const std::vector<double> knots = detail::tau_breakpoints(spec, seg);
  if (seg.events.empty() || knots.empty()) {
    // Conditional term constant in tau: posterior is the prior itself.
    prior_exact_ = true;
    return;
  }
  tau_const_ = knots.back();

  detail::Evaluator ev(spec, seg.duration);

  // Cells per inter-knot piece proportional to prior mass, with a floor so
  // every smooth piece is represented even far out in the prior tail.
  const std::size_t pieces = knots.size();
  std::vector<double> lo(pieces), hi(pieces), mass(pieces);
  double bulk_prior = 0.0;
  for (std::size_t p = 0; p < pieces; ++p) {
    lo[p] = p == 0 ? 0.0 : knots[p - 1];
    hi[p] = knots[p];
    mass[p] = prior_.cdf(hi[p]) - prior_.cdf(lo[p]);
    bulk_prior += mass[p];
  }
  edges_.push_back(0.0);
  for (std::size_t p = 0; p < pieces; ++p) {
    int cells = 8;
    if (bulk_prior > 0.0)
      cells = std::max(
          8, static_cast<int>(std::lround(grid_cells * mass[p] / bulk_prior)));
    const double w = (hi[p] - lo[p]) / cells;
    for (int c = 1; c <= cells; ++c) edges_.push_back(lo[p] + c * w);
    edges_.back() = hi[p];
  }

  // Cell masses from the midpoint likelihood times the exact prior increment.
  // The likelihood must be read at midpoints: events flip between the hot and
  // regular branches exactly at the knots, so the conditional log-likelihood
  // jumps there and edge evaluations would take the wrong branch for the
  // piece below.  Within a cell the law then follows the prior's shape, which
  // is smooth everywhere.
  const std::size_t n = edges_.size() - 1;
  std::vector<double> ll(n);
  double ll_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    ll[j] = ev.cond_loglik(seg, 0.5 * (edges_[j] + edges_[j + 1]));
    ll_max = std::max(ll_max, ll[j]);
  }
  const double ll_tail = ev.cond_loglik(seg, tau_const_);
  ll_max = std::max(ll_max, ll_tail);
  if (!std::isfinite(ll_max))
    throw NumericalError("tau posterior degenerate for segment " +
                         seg.id.str());

  prior_cdf_.resize(n + 1);
  pdf_.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    prior_cdf_[j] = prior_.cdf(edges_[j]);
    pdf_[j] = prior_.pdf(edges_[j]);
  }
  cum_.assign(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double inc = prior_cdf_[j + 1] - prior_cdf_[j];
    cum_[j + 1] = cum_[j] + std::exp(ll[j] - ll_max) * inc;
  }
  const double tail_w = std::exp(ll_tail - ll_max) * prior_.survival(tau_const_);
  const double total = cum_.back() + tail_w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalError("tau posterior degenerate for segment " +
                         seg.id.str());
  for (auto& c : cum_) c /= total;
  tail_mass_ = tail_w / total;
}

// Within a cell the conditional law follows the prior restricted to the
// cell (the likelihood factor is flat there to second order).  In the bulk
// the prior density is near-linear across a cell and is inverted in closed
// form; where it swings harder across one cell (floor-allocated pieces out
// in the prior tail, or a density blowing up at zero) the draw goes through
// the exact prior CDF instead, so wide cells cannot distort the tail
// moments that the information matrix is sensitive to.

namespace {
// Linear interpolation of the density across one cell is accurate only
// while the edge values stay comparable.
bool near_linear(double f0, double f1) {
  if (!std::isfinite(f0) || !std::isfinite(f1)) return false;
  const double lo = std::min(f0, f1), hi = std::max(f0, f1);
  return lo > 0.0 && hi <= 1.3 * lo;
}

// Conditional inverse CDF of a linear density with edge values (f0, f1),
// mapped to [0, 1]: stable root of (f1-f0) s^2 + 2 f0 s = v (f0+f1).
double linear_offset(double f0, double f1, double v) {
  const double a = f1 - f0;
  const double disc = std::max(f0 * f0 + a * v * (f0 + f1), 0.0);
  const double den = f0 + std::sqrt(disc);
  return den > 0.0 ? v * (f0 + f1) / den : v;
}
}  // namespace

double TauPosterior::cell_offset(std::size_t j, double v) const {
  const double w = edges_[j + 1] - edges_[j];
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return w;
  const double f0 = pdf_[j], f1 = pdf_[j + 1];
  if (near_linear(f0, f1)) return w * linear_offset(f0, f1, v);
  const double dp = prior_cdf_[j + 1] - prior_cdf_[j];
  if (dp > 0.0 && std::isfinite(dp))
    return std::clamp(prior_.quantile(prior_cdf_[j] + v * dp) - edges_[j],
                      0.0, w);
  if (std::isfinite(f0) && std::isfinite(f1) && f0 + f1 > 0.0)
    return w * linear_offset(f0, f1, v);
  return v * w;
}

double TauPosterior::cell_cdf(std::size_t j, double x) const {
  const double w = edges_[j + 1] - edges_[j];
  const double s = std::clamp((x - edges_[j]) / w, 0.0, 1.0);
  const double f0 = pdf_[j], f1 = pdf_[j + 1];
  if (near_linear(f0, f1))
    return (2.0 * f0 * s + (f1 - f0) * s * s) / (f0 + f1);
  const double dp = prior_cdf_[j + 1] - prior_cdf_[j];
  if (dp > 0.0 && std::isfinite(dp))
    return std::clamp((prior_.cdf(x) - prior_cdf_[j]) / dp, 0.0, 1.0);
  if (std::isfinite(f0) && std::isfinite(f1) && f0 + f1 > 0.0)
    return (2.0 * f0 * s + (f1 - f0) * s * s) / (f0 + f1);
  return s;
}

double TauPosterior::cdf(double x) const {
  if (prior_exact_) return prior_.cdf(x);
  if (x <= 0.0) return 0.0;
  if (x >= tau_const_) {
    const double fc = prior_.cdf(tau_const_);
    const double sc = 1.0 - fc;
    if (sc <= 0.0) return 1.0;
    return cum_.back() + tail_mass_ * (prior_.cdf(x) - fc) / sc;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cum_[j] + (cum_[j + 1] - cum_[j]) * cell_cdf(j, x);
}

double TauPosterior::mean() const {
  if (prior_exact_) return prior_.mean();
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < cum_.size(); ++j) {
    const double mass = cum_[j + 1] - cum_[j];
    if (mass <= 0.0) continue;
    const double f0 = pdf_[j], f1 = pdf_[j + 1];
    const double w = edges_[j + 1] - edges_[j];
    const double dp = prior_cdf_[j + 1] - prior_cdf_[j];
    double cm;
    if (near_linear(f0, f1)) {
      cm = edges_[j] + w * (f0 + 2.0 * f1) / (3.0 * (f0 + f1));
    } else if (dp > 0.0 && std::isfinite(dp)) {
      // Exact truncated-gamma conditional mean over the cell.
      cm = (prior_.shape / prior_.rate) *
           (boost::math::gamma_q(prior_.shape + 1.0,
                                 prior_.rate * edges_[j]) -
            boost::math::gamma_q(prior_.shape + 1.0,
                                 prior_.rate * edges_[j + 1])) /
           dp;
    } else if (std::isfinite(f0) && std::isfinite(f1) && f0 + f1 > 0.0) {
      cm = edges_[j] + w * (f0 + 2.0 * f1) / (3.0 * (f0 + f1));
    } else {
      cm = edges_[j] + 0.5 * w;
    }
    m += mass * cm;
  }
  if (tail_mass_ > 0.0) {
    const double sc = prior_.survival(tau_const_);
    // E[tau 1(tau > c)] = (shape/rate) * upper-gamma(shape+1, rate*c).
    const double part =
        (prior_.shape / prior_.rate) *
        boost::math::gamma_q(prior_.shape + 1.0, prior_.rate * tau_const_);
    m += tail_mass_ * part / sc;
  }
  return m;
}

double TauPosterior::sample(Rng& rng) const {
  // One uniform per draw, inverted through the CDF in every branch: with a
  // frozen uniform stream the draw is a continuous function of the model
  // parameters, which lets the EM iteration settle instead of jittering.
  return quantile(rng.uniform());
}

double TauPosterior::quantile(double u) const {
  if (prior_exact_) return prior_.quantile(u);
  const double bulk = cum_.back();
  if (tail_mass_ > 0.0 && u >= bulk) {
    const double v = (u - bulk) / tail_mass_;
    const double q =
        std::max(prior_.survival(tau_const_) * (1.0 - v), 1e-300);
    return prior_.quantile_upper(q);
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const std::size_t j = static_cast<std::size_t>(it - cum_.begin()) - 1;
  const double span = cum_[j + 1] - cum_[j];
  return edges_[j] + cell_offset(j, (u - cum_[j]) / span);
}

std::vector<double> sample_tau_posterior(const ModelSpec& spec,
                                         const Segment& seg, int m, Rng& rng,
                                         int grid_cells) {
  if (m < 1) throw std::invalid_argument("sample_tau_posterior: m must be >= 1");
  TauPosterior post(spec, seg, grid_cells);
  std::vector<double> draws(m);
  for (int i = 0; i < m; ++i) draws[i] = post.sample(rng);
  return draws;
}

}  // namespace hotstate
