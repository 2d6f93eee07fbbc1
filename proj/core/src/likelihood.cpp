#include "hotstate/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hotstate/quad.hpp"

namespace hotstate {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_dot(const std::vector<double>& beta, const std::vector<double>& z) {
  if (beta.size() != z.size())
    throw std::invalid_argument("covariate dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) dot += beta[i] * z[i];
  return dot;
}

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

namespace detail {

LdeCum::LdeCum(const LogDoubleExpBaseline& b, double t_max) : b_(b) {
  t_max_ = std::max(t_max, 1e-6);
  const int panels = 2048;
  h_ = t_max_ / panels;
  prefix_.resize(panels + 1);
  prefix_[0] = 0.0;
  const BaselineSpec spec{b_};
  for (int i = 0; i < panels; ++i) {
    const double lo = i * h_, hi = lo + h_;
    prefix_[i + 1] =
        prefix_[i] + gl_integrate([&](double t) { return baseline_rate(spec, t); },
                                  lo, hi, 12);
  }
}

double LdeCum::value_at(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= t_max_) {
    // Outside the cached range (rare); extend with adaptive quadrature.
    const BaselineSpec spec{b_};
    return prefix_.back() +
           integrate_adaptive([&](double t) { return baseline_rate(spec, t); },
                              t_max_, x, 1e-10);
  }
  const int i = static_cast<int>(x / h_);
  const double lo = i * h_;
  const BaselineSpec spec{b_};
  return prefix_[i] +
         gl_integrate([&](double t) { return baseline_rate(spec, t); }, lo, x, 12);
}

double LdeCum::integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  return value_at(b) - value_at(a);
}

Evaluator::Evaluator(const ModelSpec& spec, double t_max) : spec_(spec) {
  validate(spec_);
  prop_ = proportional_hot(spec_);
  if (prop_) nu_ = std::get<ProportionalHot>(spec_.hot_baseline).nu;
  if (t_max > 0.0) {
    if (const auto* d = std::get_if<LogDoubleExpBaseline>(&spec_.regular_baseline)) {
      reg_cum_ = LdeCum(*d, t_max);
      reg_cached_ = true;
    }
    if (!prop_) {
      if (const auto* d = std::get_if<LogDoubleExpBaseline>(&spec_.hot_baseline)) {
        hot_cum_ = LdeCum(*d, t_max);
        hot_cached_ = true;
      }
    }
  }
}

double Evaluator::reg_integral(double a, double b) const {
  if (reg_cached_) return reg_cum_.integral(a, b);
  return baseline_integral(spec_.regular_baseline, a, b);
}

double Evaluator::hot_integral(double a, double b) const {
  if (hot_cached_) return hot_cum_.integral(a, b);
  return baseline_integral(hot_baseline_spec(spec_), a, b);
}

double Evaluator::cond_loglik(const Segment& seg, double tau,
                              CondDiagnostics* diag) const {
  if (!(tau >= 0.0)) throw std::invalid_argument("cond_loglik: tau must be >= 0");

  const double b0z = log_dot(spec_.beta_regular, seg.covariates);
  const double b1z =
      prop_ ? b0z + nu_
            : log_dot(spec_.beta_hot ? *spec_.beta_hot : spec_.beta_regular,
                      seg.covariates);

  const auto& ev = seg.events;
  double sum_log = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const bool hot = k > 0 && (ev[k] - ev[k - 1] <= tau);
    double log_lambda;
    if (hot) {
      const double base = prop_ ? baseline_rate(spec_.regular_baseline, ev[k])
                                : baseline_rate(hot_baseline_spec(spec_), ev[k]);
      log_lambda = std::log(base) + b1z;
    } else {
      log_lambda = std::log(baseline_rate(spec_.regular_baseline, ev[k])) + b0z;
    }
    if (!std::isfinite(log_lambda)) {
      if (diag) {
        diag->zero_intensity_event = true;
        diag->event_index = static_cast<int>(k);
      }
      return kNegInf;
    }
    sum_log += log_lambda;
  }

  // Hot windows (T_k, T_k + min(tau, gap to next boundary)] are disjoint by
  // construction, so no merge pass is needed for the integrals.
  double hot_reg = 0.0, hot_hot = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const double next = (k + 1 < ev.size()) ? ev[k + 1] : seg.duration;
    const double hi = std::min(ev[k] + tau, next);
    if (hi <= ev[k]) continue;
    hot_reg += reg_integral(ev[k], hi);
    if (!prop_) hot_hot += hot_integral(ev[k], hi);
  }

  const double total_reg = reg_integral(0.0, seg.duration);
  double big_lambda;
  if (prop_) {
    big_lambda = std::exp(b0z) * (total_reg + (std::exp(nu_) - 1.0) * hot_reg);
  } else {
    big_lambda = std::exp(b0z) * (total_reg - hot_reg) + std::exp(b1z) * hot_hot;
  }
  return sum_log - big_lambda;
}

double tau_const_bound(const Segment& seg) {
  double bound = 0.0;
  const auto& ev = seg.events;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const double next = (k + 1 < ev.size()) ? ev[k + 1] : seg.duration;
    bound = std::max(bound, next - ev[k]);
  }
  return bound;
}

std::vector<double> tau_breakpoints(const ModelSpec& spec, const Segment& seg) {
  const double bound = tau_const_bound(seg);
  std::vector<double> pts;
  const auto& ev = seg.events;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const double next = (k + 1 < ev.size()) ? ev[k + 1] : seg.duration;
    const double d = next - ev[k];
    if (d > 0.0 && d <= bound) pts.push_back(d);
  }
  // Piecewise baselines add integral kinks where a window end crosses a cut.
  auto add_cut_crossings = [&](const std::vector<double>& cuts) {
    for (std::size_t k = 0; k < ev.size(); ++k) {
      const double next = (k + 1 < ev.size()) ? ev[k + 1] : seg.duration;
      for (double c : cuts) {
        const double v = c - ev[k];
        if (v > 0.0 && v < next - ev[k]) pts.push_back(v);
      }
    }
  };
  if (const auto* p = std::get_if<PiecewiseConstantBaseline>(&spec.regular_baseline))
    add_cut_crossings(p->cuts);
  if (const auto* p = std::get_if<PiecewiseConstantBaseline>(&spec.hot_baseline))
    add_cut_crossings(p->cuts);

  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double v : pts) {
    if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, out.back()))
      out.push_back(v);
  }
  return out;
}

}  // namespace detail

double cond_loglik(const ModelSpec& spec, const Segment& seg, double tau,
                   CondDiagnostics* diag) {
  return detail::Evaluator(spec, 0.0).cond_loglik(seg, tau, diag);
}

namespace {

double marginal_segment_impl(const detail::Evaluator& ev, const Segment& seg,
                             int nodes) {
  const ModelSpec& theta = ev.spec();
  validate(theta.tau_dist);
  if (nodes < 16)
    throw std::invalid_argument("marginal_loglik: quadrature_nodes must be >= 16");

  const std::vector<double> knots = detail::tau_breakpoints(theta, seg);
  if (knots.empty()) return ev.cond_loglik(seg, 0.0);

  const double tau_const = knots.back();
  // Panel width tied to the gamma bulk so long smooth pieces still resolve
  // the duration density.
  const double bulk =
      theta.tau_dist.quantile(0.999) - theta.tau_dist.quantile(0.001);
  const double h_max = std::max(bulk / 8.0, 1e-8);

  const auto& rule = detail::gauss_legendre(nodes);
  std::vector<double> terms;
  double lo = 0.0;
  for (double hi : knots) {
    const int panels =
        std::min(200, std::max(1, static_cast<int>(std::ceil((hi - lo) / h_max))));
    const double ph = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * ph, b = a + ph;
      const double c = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t j = 0; j < rule.x.size(); ++j) {
        const double tau = c + half * rule.x[j];
        const double ll = ev.cond_loglik(seg, tau);
        terms.push_back(ll + theta.tau_dist.log_pdf(tau) +
                        std::log(rule.w[j] * half));
      }
    }
    lo = hi;
  }
  // Beyond the last breakpoint the conditional term no longer depends on
  // tau; the remaining gamma mass integrates in closed form.
  const double tail_mass = theta.tau_dist.survival(tau_const);
  if (tail_mass > 0.0)
    terms.push_back(ev.cond_loglik(seg, tau_const) + std::log(tail_mass));

  return logsumexp(terms);
}

}  // namespace

double marginal_loglik_segment(const ModelSpec& theta, const Segment& seg,
                               int quadrature_nodes) {
  detail::Evaluator ev(theta, seg.duration);
  return marginal_segment_impl(ev, seg, quadrature_nodes);
}

double marginal_loglik(const LikelihoodContext& ctx, const ModelSpec& theta) {
  double t_max = 0.0;
  for (const auto& seg : ctx.segments) t_max = std::max(t_max, seg.duration);
  detail::Evaluator ev(theta, t_max);
  double acc = 0.0;
  for (const auto& seg : ctx.segments)
    acc += marginal_segment_impl(ev, seg, ctx.quadrature_nodes);
  return acc;
}

double full_loglik(const ModelSpec& spec, const std::vector<Segment>& segments,
                   const std::vector<double>& taus) {
  if (segments.size() != taus.size())
    throw std::invalid_argument("full_loglik: one tau per segment required");
  if (segments.empty()) return 0.0;
  validate(spec.tau_dist);
  double t_max = 0.0;
  for (const auto& seg : segments) t_max = std::max(t_max, seg.duration);
  detail::Evaluator ev(spec, t_max);
  double acc = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(taus[i] >= 0.0))
      throw std::invalid_argument("full_loglik: tau must be >= 0");
    acc += ev.cond_loglik(segments[i], taus[i]) + spec.tau_dist.log_pdf(taus[i]);
  }
  return acc;
}

}  // namespace hotstate
