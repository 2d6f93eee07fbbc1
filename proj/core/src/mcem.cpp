#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "hotstate/collapsed.hpp"
#include "hotstate/errors.hpp"
#include "hotstate/inference.hpp"
#include "hotstate/likelihood.hpp"
#include "hotstate/optim.hpp"
#include "hotstate/parallel.hpp"
#include "hotstate/param_pack.hpp"

namespace hotstate {

int McemConfig::mc_samples(int d) const {
  const double m = m0 * std::pow(m_growth, d);
  if (m >= m_max) return m_max;
  return std::max(1, static_cast<int>(std::ceil(m)));
}

namespace {

void check_config(const McemConfig& cfg) {
  if (cfg.max_iters < 1)
    throw std::invalid_argument("McemConfig: max_iters must be >= 1");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("McemConfig: tolerance must be > 0");
  if (cfg.patience < 1)
    throw std::invalid_argument("McemConfig: patience must be >= 1");
  if (cfg.m0 < 1 || cfg.m_max < cfg.m0 || !(cfg.m_growth >= 1.0))
    throw std::invalid_argument("McemConfig: sample schedule must be nondecreasing");
  if (cfg.grid_cells < 8)
    throw std::invalid_argument("McemConfig: grid_cells must be >= 8");
  if (cfg.threads < 1)
    throw std::invalid_argument("McemConfig: threads must be >= 1");
  if (!cfg.tau_latent && !(cfg.fixed_tau >= 0.0))
    throw std::invalid_argument("McemConfig: fixed_tau must be >= 0");
  if (cfg.compute_se && cfg.se_samples < 500)
    throw std::invalid_argument("McemConfig: se_samples must be >= 500");
}

double ordered_sum(const std::vector<double>& terms) {
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

}  // namespace

double crude_rate(const std::vector<Segment>& segments) {
  double events = 0.0, time = 0.0;
  for (const auto& seg : segments) {
    events += static_cast<double>(seg.events.size());
    time += seg.duration;
  }
  if (!(time > 0.0))
    throw std::invalid_argument("crude_rate: total observation time is zero");
  return std::max(events / time, 1e-4);
}

ModelSpec default_init(const ModelSpec& skeleton,
                       const std::vector<Segment>& segments) {
  const double r = crude_rate(segments);
  ModelSpec init = skeleton;

  auto fill_baseline = [r](BaselineSpec& b, double scale) {
    if (auto* c = std::get_if<ConstantBaseline>(&b)) {
      c->rate = scale * r;
    } else if (auto* p = std::get_if<PiecewiseConstantBaseline>(&b)) {
      std::fill(p->levels.begin(), p->levels.end(), scale * r);
    } else {
      auto& d = std::get<LogDoubleExpBaseline>(b);
      d.theta1 = std::log(scale * r);
      d.theta2 = 0.01;
      d.theta3 = 0.5;
      d.theta4 = 1.0;
    }
  };

  fill_baseline(init.regular_baseline, 1.0);
  if (auto* prop = std::get_if<ProportionalHot>(&init.hot_baseline)) {
    prop->nu = 0.5;
  } else if (auto* c = std::get_if<ConstantBaseline>(&init.hot_baseline)) {
    c->rate = 2.0 * r;
  } else if (auto* p = std::get_if<PiecewiseConstantBaseline>(&init.hot_baseline)) {
    std::fill(p->levels.begin(), p->levels.end(), 2.0 * r);
  } else {
    auto& d = std::get<LogDoubleExpBaseline>(init.hot_baseline);
    d.theta1 = std::log(2.0 * r);
    d.theta2 = 0.01;
    d.theta3 = 0.5;
    d.theta4 = 1.0;
  }

  std::fill(init.beta_regular.begin(), init.beta_regular.end(), 0.0);
  if (init.beta_hot)
    std::fill(init.beta_hot->begin(), init.beta_hot->end(), 0.0);
  init.tau_dist = HotDurationDist{4.0, 2.0};
  return init;
}

FitResult mcem_fit(const std::vector<Segment>& segments, const ModelSpec& init,
                   const McemConfig& cfg) {
  check_config(cfg);
  validate(init);
  if (cfg.tau_latent) validate(init.tau_dist);
  if (segments.empty())
    throw std::invalid_argument("mcem_fit: no segments");
  for (const auto& seg : segments) {
    validate(seg);
    if (seg.covariates.size() != init.beta_regular.size())
      throw std::invalid_argument("mcem_fit: covariate dimension mismatch in segment " +
                                  seg.id.str());
  }

  FitResult out;
  out.tau_latent = cfg.tau_latent;
  out.fixed_tau = cfg.fixed_tau;
  out.fixed = cfg.fixed;

  bool any_events = false;
  for (const auto& seg : segments) any_events |= !seg.events.empty();
  if (!any_events)
    out.warnings.push_back(
        "no segment contains events; hot-branch parameters are not identified");

  detail::ParamPacker packer(init, cfg.tau_latent, cfg.fixed);
  out.names = packer.names();
  std::vector<double> x = packer.pack(init);

  if (packer.dim() == 0) {
    out.theta_hat = init;
    out.converged = true;
    out.se_message = "no free parameters";
    return out;
  }

  const std::size_t n = segments.size();
  const bool fast = detail::collapsible(init);
  std::vector<detail::CollapsedSegment> csegs;
  if (fast) {
    csegs.reserve(n);
    for (const auto& seg : segments) csegs.emplace_back(init, seg);
  }
  double t_max = 0.0;
  for (const auto& seg : segments) t_max = std::max(t_max, seg.duration);

  std::vector<detail::SegTauStats> stats(n);
  std::vector<std::vector<double>> draws(n);

  // Per-segment complete-data objective terms at one theta; index-ordered
  // reduction keeps results identical for every thread count.
  std::vector<double> terms(n);
  auto fill_terms = [&](const std::vector<double>& xv) {
    const ModelSpec th = packer.unpack(xv);
    if (fast) {
      const detail::CollapsedModel cm(th);
      detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
        double t = cm.cond(segments[i].covariates, stats[i]);
        if (cfg.tau_latent) t += cm.tau_term(stats[i]);
        terms[i] = t;
      });
    } else {
      const detail::Evaluator ev(th, t_max);
      detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
        double t = 0.0;
        for (double tau : draws[i]) {
          t += ev.cond_loglik(segments[i], tau);
          if (cfg.tau_latent) t += th.tau_dist.log_pdf(tau);
        }
        terms[i] = t / static_cast<double>(draws[i].size());
      });
    }
  };
  auto objective = [&](const std::vector<double>& xv) {
    fill_terms(xv);
    return -ordered_sum(terms);
  };

  // One Q-tilde maximization: E-step draws at xin, then the M-step from xin.
  // `call` is the E-step counter; it drives the sample-size schedule and the
  // iteration budget.  A step can fail soft (tolerant=true, used on
  // extrapolated restart points) or hard.
  struct StepOut {
    std::vector<double> x;
    int call = 0;
    int m = 0;
    double q_before = 0.0;
    double q_after = 0.0;
    double rel = 0.0;
    bool ok = false;
  };
  int call = 0;
  int streak = 0;
  bool converged = false;

  auto em_step = [&](const std::vector<double>& xin, bool tolerant) -> StepOut {
    StepOut s;
    s.call = call;
    s.m = cfg.tau_latent ? cfg.mc_samples(call) : 1;
    ++call;
    const int M = s.m;
    const ModelSpec cur = packer.unpack(xin);

    detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
      if (!cfg.tau_latent) {
        if (fast)
          csegs[i].stats(cfg.fixed_tau, stats[i]);
        else
          draws[i].assign(1, cfg.fixed_tau);
        return;
      }
      // One frozen uniform stream per segment, shared by every iteration:
      // with inverse-CDF sampling the E-step is then a continuous map of the
      // current parameters, so the iteration contracts to a fixed point of
      // the capped-M update instead of hovering in Monte Carlo noise.
      // Draw k is jittered into quantile stratum [k/M, (k+1)/M); each draw
      // is still an exact posterior draw and the stream still consumes one
      // uniform per draw, but averaged statistics lose the 1/sqrt(M) noise.
      Rng rng = Rng::substream(cfg.seed, 0x4531, i);
      const TauPosterior post(cur, segments[i], cfg.grid_cells);
      if (fast) {
        detail::SegTauStats acc, one;
        acc.resize(csegs[i].reg_pieces(), csegs[i].hot_pieces());
        const double w = 1.0 / M;
        for (int m = 0; m < M; ++m) {
          csegs[i].stats(post.quantile((m + rng.uniform()) / M), one);
          acc.add_scaled(one, w);
        }
        stats[i] = std::move(acc);
      } else {
        draws[i].resize(M);
        for (int m = 0; m < M; ++m)
          draws[i][m] = post.quantile((m + rng.uniform()) / M);
      }
    });

    s.q_before = -objective(xin);
    if (!std::isfinite(s.q_before)) {
      if (tolerant) return s;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(terms[i]))
          throw NumericalError("mcem_fit: non-finite Q at iteration " +
                               std::to_string(s.call) + " for segment " +
                               segments[i].id.str());
      }
      throw NumericalError("mcem_fit: non-finite Q at iteration " +
                           std::to_string(s.call));
    }

    const detail::OptimResult opt =
        cfg.optimizer == McemConfig::Optimizer::QuasiNewton
            ? detail::minimize_bfgs(objective, xin, cfg.opt_max_iters,
                                    cfg.opt_gtol, cfg.fd_step)
            : detail::minimize_nelder_mead(objective, xin,
                                           20 * cfg.opt_max_iters, 1e-10);
    s.q_after = -opt.f;
    const bool no_progress =
        !opt.converged &&
        opt.f >= -s.q_before - 1e-15 * (1.0 + std::abs(s.q_before));
    if (!std::isfinite(opt.f) || no_progress) return s;

    for (std::size_t j = 0; j < xin.size(); ++j)
      s.rel = std::max(s.rel, std::abs(opt.x[j] - xin[j]) /
                                  std::max(1.0, std::abs(xin[j])));
    s.x = opt.x;
    s.ok = true;
    return s;
  };

  auto accept = [&](const StepOut& s) {
    IterationRecord rec;
    rec.iteration = s.call;
    rec.m_samples = s.m;
    rec.q_before = s.q_before;
    rec.q_after = s.q_after;
    rec.rel_change = s.rel;
    rec.natural = packer.natural(s.x);
    out.trace.push_back(std::move(rec));
    x = s.x;
    streak = s.rel < cfg.tol ? streak + 1 : 0;
    if (streak >= cfg.patience) converged = true;
  };

  auto fail_out = [&](const StepOut& s) {
    IterationRecord rec;
    rec.iteration = s.call;
    rec.m_samples = s.m;
    rec.q_before = s.q_before;
    rec.q_after = s.q_after;
    rec.natural = packer.natural(x);
    out.trace.push_back(std::move(rec));
    out.warnings.push_back("optimizer made no progress at iteration " +
                           std::to_string(s.call));
    out.converged = false;
    out.theta_hat = packer.unpack(x);
    out.estimates = packer.natural(x);
    out.se_message = "not computed: fit did not converge";
  };

  if (!cfg.tau_latent) {
    // The M-step maximizes the true objective directly; no acceleration.
    while (call < cfg.max_iters && !converged) {
      const StepOut s = em_step(x, false);
      if (!s.ok) {
        fail_out(s);
        return out;
      }
      accept(s);
    }
  } else {
    // The EM map crawls along the gamma (shape, rate) ridge, where most of
    // the information about tau is missing.  Squared extrapolation over two
    // EM steps jumps down that ridge; every candidate restart point is
    // stabilized by a further EM step and accepted only if the exact
    // quadrature marginal does not get worse, so the accelerated sequence
    // inherits EM's reliability.
    LikelihoodContext merit_ctx{init, segments, 64};
    auto merit = [&](const std::vector<double>& xv) {
      return marginal_loglik(merit_ctx, packer.unpack(xv));
    };
    double alpha_cap = 4.0;
    while (call < cfg.max_iters && !converged) {
      const std::vector<double> x0 = x;
      const StepOut s1 = em_step(x0, false);
      if (!s1.ok) {
        fail_out(s1);
        return out;
      }
      accept(s1);
      if (converged || call >= cfg.max_iters) break;
      const StepOut s2 = em_step(s1.x, false);
      if (!s2.ok) {
        fail_out(s2);
        return out;
      }
      accept(s2);
      if (converged || call >= cfg.max_iters) break;

      double rr = 0.0, vv = 0.0;
      std::vector<double> xs(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double r = s1.x[j] - x0[j];
        const double v = s2.x[j] - s1.x[j] - r;
        rr += r * r;
        vv += v * v;
        xs[j] = r;          // reused below
      }
      if (!(vv > 1e-300)) continue;
      double alpha = -std::sqrt(rr / vv);
      if (alpha >= -1.0) continue;  // extrapolation would not pass x2
      const bool capped = alpha < -alpha_cap;
      if (capped) alpha = -alpha_cap;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double r = xs[j];
        const double v = s2.x[j] - s1.x[j] - r;
        xs[j] = x0[j] - 2.0 * alpha * r + alpha * alpha * v;
      }

      bool accepted = false;
      try {
        const StepOut s3 = em_step(xs, true);
        if (s3.ok) {
          const double m2 = merit(s2.x);
          const double m3 = merit(s3.x);
          if (m3 >= m2 - 1e-8 * (1.0 + std::abs(m2))) {
            accept(s3);
            accepted = true;
            if (capped) alpha_cap *= 4.0;
          }
        }
      } catch (const NumericalError&) {
        // Overshoot into a degenerate region; keep the plain EM iterate.
      }
      if (!accepted) alpha_cap = 4.0;
    }
  }
  out.converged = converged;

  out.theta_hat = packer.unpack(x);
  out.estimates = packer.natural(x);

  if (out.converged && cfg.compute_se) {
    const LouisResult lr = louis_se(out, segments, cfg.se_samples, cfg.seed,
                                    cfg.grid_cells, cfg.threads);
    out.se = lr.se;
    out.se_available = lr.available;
    out.se_message = lr.message;
  } else if (!out.converged) {
    out.se_message = "not computed: fit did not converge";
  }
  return out;
}

}  // namespace hotstate
