#include "hotstate/process_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "hotstate/quad.hpp"

namespace hotstate {

// ---- baselines -------------------------------------------------------

namespace {

double lde_log_rate(const LogDoubleExpBaseline& b, double t) {
  return b.theta1 + b.theta2 * (std::exp(-b.theta3 * t) - std::exp(-b.theta4 * t));
}

}  // namespace

void validate(const BaselineSpec& b) {
  if (const auto* c = std::get_if<ConstantBaseline>(&b)) {
    if (!(c->rate > 0.0))
      throw std::invalid_argument("ConstantBaseline: rate must be > 0");
    return;
  }
  if (const auto* d = std::get_if<LogDoubleExpBaseline>(&b)) {
    if (!(d->theta3 > 0.0) || !(d->theta4 > 0.0))
      throw std::invalid_argument("LogDoubleExpBaseline: theta3, theta4 must be > 0");
    if (!std::isfinite(d->theta1) || !std::isfinite(d->theta2))
      throw std::invalid_argument("LogDoubleExpBaseline: non-finite parameter");
    return;
  }
  const auto& p = std::get<PiecewiseConstantBaseline>(b);
  if (p.cuts.empty() || p.cuts.size() != p.levels.size())
    throw std::invalid_argument("PiecewiseConstantBaseline: cuts/levels size mismatch");
  if (p.cuts.front() != 0.0)
    throw std::invalid_argument("PiecewiseConstantBaseline: cuts[0] must be 0");
  for (std::size_t i = 1; i < p.cuts.size(); ++i)
    if (!(p.cuts[i] > p.cuts[i - 1]))
      throw std::invalid_argument("PiecewiseConstantBaseline: cuts must ascend");
  for (double lv : p.levels)
    if (!(lv > 0.0))
      throw std::invalid_argument("PiecewiseConstantBaseline: levels must be > 0");
}

double baseline_rate(const BaselineSpec& b, double t) {
  if (const auto* c = std::get_if<ConstantBaseline>(&b)) return c->rate;
  if (const auto* d = std::get_if<LogDoubleExpBaseline>(&b))
    return std::exp(lde_log_rate(*d, t));
  const auto& p = std::get<PiecewiseConstantBaseline>(b);
  // Right-continuous step lookup; the last level continues past the grid.
  auto it = std::upper_bound(p.cuts.begin(), p.cuts.end(), t);
  const std::size_t idx = (it == p.cuts.begin()) ? 0 : (it - p.cuts.begin() - 1);
  return p.levels[idx];
}

double baseline_integral(const BaselineSpec& b, double a, double e) {
  if (!(e > a)) return 0.0;
  if (const auto* c = std::get_if<ConstantBaseline>(&b)) return c->rate * (e - a);
  if (const auto* d = std::get_if<LogDoubleExpBaseline>(&b)) {
    return detail::integrate_adaptive(
        [d](double t) { return std::exp(lde_log_rate(*d, t)); }, a, e, 1e-10);
  }
  const auto& p = std::get<PiecewiseConstantBaseline>(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cuts.size(); ++i) {
    const double lo = std::max(a, p.cuts[i]);
    const double hi =
        (i + 1 < p.cuts.size()) ? std::min(e, p.cuts[i + 1]) : e;
    if (hi > lo) acc += p.levels[i] * (hi - lo);
  }
  return acc;
}

double baseline_sup(const BaselineSpec& b, double a, double e) {
  if (e < a) throw std::domain_error("baseline_sup: a > b");
  if (const auto* c = std::get_if<ConstantBaseline>(&b)) return c->rate;
  if (const auto* d = std::get_if<LogDoubleExpBaseline>(&b)) {
    double best = std::max(std::exp(lde_log_rate(*d, a)),
                           std::exp(lde_log_rate(*d, e)));
    // The inner term exp(-t3 t) - exp(-t4 t) has one critical point.
    if (d->theta3 != d->theta4) {
      const double ts = std::log(d->theta4 / d->theta3) / (d->theta4 - d->theta3);
      if (ts > a && ts < e)
        best = std::max(best, std::exp(lde_log_rate(*d, ts)));
    }
    return best;
  }
  const auto& p = std::get<PiecewiseConstantBaseline>(b);
  double best = 0.0;
  for (std::size_t i = 0; i < p.cuts.size(); ++i) {
    const double lo = p.cuts[i];
    const double hi = (i + 1 < p.cuts.size()) ? p.cuts[i + 1]
                                              : std::max(e, lo);
    if (hi >= a && lo <= e) best = std::max(best, p.levels[i]);
  }
  return best;
}

// ---- hot-window duration law -----------------------------------------

void validate(const HotDurationDist& d) {
  if (!(d.shape > 0.0) || !(d.rate > 0.0))
    throw std::invalid_argument("HotDurationDist: shape and rate must be > 0");
}

double HotDurationDist::mean() const {
  validate(*this);
  return shape / rate;
}

double HotDurationDist::sd() const {
  validate(*this);
  return std::sqrt(shape) / rate;
}

double HotDurationDist::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  return std::exp(log_pdf(x));
}

double HotDurationDist::log_pdf(double x) const {
  validate(*this);
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - boost::math::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double HotDurationDist::cdf(double x) const {
  validate(*this);
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, rate * x);
}

double HotDurationDist::survival(double x) const {
  validate(*this);
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(shape, rate * x);
}

double HotDurationDist::quantile(double p) const {
  validate(*this);
  if (!(p >= 0.0) || p >= 1.0)
    throw std::domain_error("HotDurationDist::quantile: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  return boost::math::gamma_p_inv(shape, p) / rate;
}

double HotDurationDist::quantile_upper(double q) const {
  validate(*this);
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("HotDurationDist::quantile_upper: q must lie in (0,1]");
  if (q == 1.0) return 0.0;
  return boost::math::gamma_q_inv(shape, q) / rate;
}

std::pair<double, double> gamma_moments(const HotDurationDist& d) {
  return {d.mean(), d.sd()};
}

// ---- model specification ---------------------------------------------

bool proportional_hot(const ModelSpec& spec) {
  return std::holds_alternative<ProportionalHot>(spec.hot_baseline);
}

const BaselineSpec hot_baseline_spec(const ModelSpec& spec) {
  if (const auto* c = std::get_if<ConstantBaseline>(&spec.hot_baseline)) return *c;
  if (const auto* d = std::get_if<LogDoubleExpBaseline>(&spec.hot_baseline)) return *d;
  if (const auto* p = std::get_if<PiecewiseConstantBaseline>(&spec.hot_baseline)) return *p;
  throw std::invalid_argument("hot_baseline_spec: hot branch is proportional");
}

void validate(const ModelSpec& spec) {
  validate(spec.regular_baseline);
  if (proportional_hot(spec)) {
    const double nu = std::get<ProportionalHot>(spec.hot_baseline).nu;
    if (!std::isfinite(nu))
      throw std::invalid_argument("ModelSpec: non-finite nu");
    if (spec.beta_hot)
      throw std::invalid_argument(
          "ModelSpec: proportional hot branch shares beta_regular; beta_hot must be empty");
  } else {
    validate(hot_baseline_spec(spec));
    if (spec.beta_hot && spec.beta_hot->size() != spec.beta_regular.size())
      throw std::invalid_argument("ModelSpec: beta_hot dimension mismatch");
  }
  for (double b : spec.beta_regular)
    if (!std::isfinite(b)) throw std::invalid_argument("ModelSpec: non-finite beta");
}

// ---- segments ---------------------------------------------------------

std::string SegmentId::str() const {
  return "match " + std::to_string(match_id) + " segment " +
         std::to_string(segment_index);
}

void validate(const Segment& seg) {
  if (!(seg.duration > 0.0))
    throw std::invalid_argument("Segment " + seg.id.str() + ": duration must be > 0");
  double prev = 0.0;
  for (double t : seg.events) {
    if (!(t > prev))
      throw std::invalid_argument("Segment " + seg.id.str() +
                                  ": event times must be strictly ascending and > 0");
    if (t > seg.duration)
      throw std::invalid_argument("Segment " + seg.id.str() +
                                  ": event beyond segment end");
    prev = t;
  }
}

// ---- hot timeline and intensities --------------------------------------

HotTimeline hot_timeline(const std::vector<double>& events, double tau,
                         double duration) {
  if (!(tau >= 0.0)) throw std::invalid_argument("hot_timeline: tau must be >= 0");
  HotTimeline out;
  double prev = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (!(events[k] > prev))
      throw std::invalid_argument("hot_timeline: events must be strictly ascending");
    prev = events[k];
    const double next = (k + 1 < events.size()) ? events[k + 1] : duration;
    const double hi = std::min(events[k] + tau, next);
    if (hi > events[k]) {
      if (!out.empty() && out.back().hi == events[k])
        out.back().hi = hi;  // abutting windows merge
      else
        out.push_back({events[k], hi});
    }
  }
  return out;
}

bool is_hot(const std::vector<double>& events, double tau, double t) {
  auto it = std::lower_bound(events.begin(), events.end(), t);
  if (it == events.begin()) return false;
  return t - *(it - 1) <= tau;
}

double covariate_multiplier(const std::vector<double>& beta,
                            const std::vector<double>& z) {
  if (beta.size() != z.size())
    throw std::invalid_argument("covariate dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) dot += beta[i] * z[i];
  return std::exp(dot);
}

double regular_intensity(const ModelSpec& spec, const std::vector<double>& z,
                         double t) {
  return baseline_rate(spec.regular_baseline, t) *
         covariate_multiplier(spec.beta_regular, z);
}

double hot_intensity(const ModelSpec& spec, const std::vector<double>& z,
                     double t) {
  if (proportional_hot(spec)) {
    return regular_intensity(spec, z, t) *
           std::exp(std::get<ProportionalHot>(spec.hot_baseline).nu);
  }
  const auto& beta = spec.beta_hot ? *spec.beta_hot : spec.beta_regular;
  return baseline_rate(hot_baseline_spec(spec), t) * covariate_multiplier(beta, z);
}

double intensity_at(const ModelSpec& spec, const Segment& seg, double tau,
                    double t) {
  if (!(t > 0.0) || !(t <= seg.duration))
    throw std::domain_error("intensity_at: t outside (0, E]");
  return is_hot(seg.events, tau, t) ? hot_intensity(spec, seg.covariates, t)
                                    : regular_intensity(spec, seg.covariates, t);
}

double cumulative_intensity(const ModelSpec& spec, const Segment& seg,
                            double tau, double a, double b) {
  if (!(a >= 0.0) || !(b <= seg.duration) || a > b)
    throw std::domain_error("cumulative_intensity: need 0 <= a <= b <= E");
  if (a == b) return 0.0;

  const double reg_mult = covariate_multiplier(spec.beta_regular, seg.covariates);
  double hot_reg_grid = 0.0;  // integral of the regular baseline over hot time
  double hot_branch = 0.0;    // integral of the hot branch over hot time

  const bool prop = proportional_hot(spec);
  for (std::size_t k = 0; k < seg.events.size(); ++k) {
    const double next =
        (k + 1 < seg.events.size()) ? seg.events[k + 1] : seg.duration;
    const double lo = std::max(a, seg.events[k]);
    const double hi = std::min(b, std::min(seg.events[k] + tau, next));
    if (hi <= lo) continue;
    if (prop) {
      hot_reg_grid += baseline_integral(spec.regular_baseline, lo, hi);
    } else {
      hot_reg_grid += baseline_integral(spec.regular_baseline, lo, hi);
      hot_branch += baseline_integral(hot_baseline_spec(spec), lo, hi);
    }
  }

  const double total_reg = baseline_integral(spec.regular_baseline, a, b);
  if (prop) {
    const double nu = std::get<ProportionalHot>(spec.hot_baseline).nu;
    return reg_mult * (total_reg + (std::exp(nu) - 1.0) * hot_reg_grid);
  }
  const auto& beta = spec.beta_hot ? *spec.beta_hot : spec.beta_regular;
  const double hot_mult = covariate_multiplier(beta, seg.covariates);
  return reg_mult * (total_reg - hot_reg_grid) + hot_mult * hot_branch;
}

}  // namespace hotstate
