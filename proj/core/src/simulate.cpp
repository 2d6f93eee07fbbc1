#include "hotstate/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hotstate/errors.hpp"
#include "hotstate/gap_time.hpp"
#include "hotstate/parallel.hpp"

namespace hotstate {

std::vector<double> simulate_constant(double lambda0, double lambda1,
                                      double tau, double duration, Rng& rng) {
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0))
    throw std::invalid_argument("simulate_constant: rates must be > 0");
  if (!(tau >= 0.0))
    throw std::invalid_argument("simulate_constant: tau must be >= 0");
  if (!(duration > 0.0))
    throw std::invalid_argument("simulate_constant: duration must be > 0");

  const ChangePointExp gap{lambda0, lambda1, tau};
  std::vector<double> events;
  double t = rng.exponential(lambda0);
  while (t <= duration) {
    events.push_back(t);
    t += gap_sample(gap, rng);
  }
  return events;
}

std::vector<double> simulate_thinning(const ModelSpec& spec,
                                      const std::vector<double>& z, double tau,
                                      double duration, Rng& rng,
                                      ThinningObserver* observer) {
  validate(spec);
  if (!(tau >= 0.0))
    throw std::invalid_argument("simulate_thinning: tau must be >= 0");
  if (!(duration > 0.0))
    throw std::invalid_argument("simulate_thinning: duration must be > 0");

  const double reg_mult = covariate_multiplier(spec.beta_regular, z);
  const bool prop = proportional_hot(spec);
  double nu = 0.0, hot_mult = 0.0;
  BaselineSpec hot_base;
  if (prop) {
    nu = std::get<ProportionalHot>(spec.hot_baseline).nu;
  } else {
    hot_base = hot_baseline_spec(spec);
    hot_mult = covariate_multiplier(
        spec.beta_hot ? *spec.beta_hot : spec.beta_regular, z);
  }

  const double sup_reg =
      baseline_sup(spec.regular_baseline, 0.0, duration) * reg_mult;
  const double sup_hot = prop
                             ? sup_reg * std::exp(nu)
                             : baseline_sup(hot_base, 0.0, duration) * hot_mult;
  const double lambda_bar = 1.001 * std::max(sup_reg, sup_hot);
  if (!std::isfinite(lambda_bar) || !(lambda_bar > 0.0))
    throw NumericalError("simulate_thinning: envelope rate is not positive and finite");

  std::vector<double> events;
  double t = 0.0;
  double hot_end = 0.0;
  for (;;) {
    t += rng.exponential(lambda_bar);
    if (t > duration) break;
    const bool hot = t < hot_end;
    double rate;
    if (hot) {
      rate = prop ? baseline_rate(spec.regular_baseline, t) * reg_mult *
                        std::exp(nu)
                  : baseline_rate(hot_base, t) * hot_mult;
    } else {
      rate = baseline_rate(spec.regular_baseline, t) * reg_mult;
    }
    if (rate > lambda_bar)
      throw NumericalError("simulate_thinning: envelope dominance violated");
    const bool accepted = rng.uniform() <= rate / lambda_bar;
    if (observer) observer->candidate(t, hot, accepted);
    if (accepted) {
      events.push_back(t);
      hot_end = t + tau;
    }
  }
  return events;
}

std::vector<double> simulate_model_segment(const ModelSpec& spec,
                                           const std::vector<double>& z,
                                           double tau, double duration,
                                           Rng& rng) {
  if (const auto* rc = std::get_if<ConstantBaseline>(&spec.regular_baseline)) {
    validate(spec);
    const double l0 = rc->rate * covariate_multiplier(spec.beta_regular, z);
    if (const auto* prop = std::get_if<ProportionalHot>(&spec.hot_baseline))
      return simulate_constant(l0, l0 * std::exp(prop->nu), tau, duration, rng);
    if (const auto* hc = std::get_if<ConstantBaseline>(&spec.hot_baseline)) {
      const double l1 =
          hc->rate * covariate_multiplier(
                         spec.beta_hot ? *spec.beta_hot : spec.beta_regular, z);
      return simulate_constant(l0, l1, tau, duration, rng);
    }
  }
  return simulate_thinning(spec, z, tau, duration, rng);
}

std::vector<std::vector<Segment>> simulate_season(const SimConfig& cfg) {
  validate(cfg.spec);
  if (cfg.draw_tau)
    validate(cfg.spec.tau_dist);
  else if (!(cfg.fixed_tau >= 0.0))
    throw std::invalid_argument("simulate_season: fixed_tau must be >= 0");
  if (cfg.replications < 1)
    throw std::invalid_argument("simulate_season: replications must be >= 1");
  if (cfg.plan.empty())
    throw std::invalid_argument("simulate_season: empty segment plan");
  for (const auto& ps : cfg.plan) {
    if (!(ps.duration > 0.0))
      throw std::invalid_argument("simulate_season: planned duration must be > 0 (segment " +
                                  ps.id.str() + ")");
    if (ps.covariates.size() != cfg.spec.beta_regular.size())
      throw std::invalid_argument("simulate_season: covariate dimension mismatch (segment " +
                                  ps.id.str() + ")");
  }

  std::vector<std::vector<Segment>> out(cfg.replications);
  detail::parallel_for(cfg.replications, cfg.threads, [&](std::size_t rep) {
    std::vector<Segment>& dataset = out[rep];
    dataset.resize(cfg.plan.size());
    for (std::size_t j = 0; j < cfg.plan.size(); ++j) {
      const PlannedSegment& ps = cfg.plan[j];
      Rng rng = Rng::substream(cfg.seed, 0x5EA5, rep, j);
      const double tau =
          cfg.draw_tau ? rng.gamma(cfg.spec.tau_dist.shape, cfg.spec.tau_dist.rate)
                       : cfg.fixed_tau;
      Segment seg;
      seg.id = ps.id;
      seg.duration = ps.duration;
      seg.covariates = ps.covariates;
      seg.events =
          simulate_model_segment(cfg.spec, ps.covariates, tau, ps.duration, rng);
      dataset[j] = std::move(seg);
    }
  });
  return out;
}

}  // namespace hotstate
