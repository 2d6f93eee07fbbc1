#pragma once

#include <vector>

#include "hotstate/process_model.hpp"

namespace hotstate {

struct CondDiagnostics {
  bool zero_intensity_event = false;
  int event_index = -1;
};

// Sum of log event intensities (left-limit history) minus the integrated
// intensity over (0, E], for one segment at a known hot-window length.
// A zero intensity at an event yields -inf plus the diagnostic flag rather
// than an exception.
double cond_loglik(const ModelSpec& spec, const Segment& seg, double tau,
                   CondDiagnostics* diag = nullptr);

struct LikelihoodContext {
  ModelSpec spec;
  std::vector<Segment> segments;
  int quadrature_nodes = 64;  // Gauss-Legendre nodes per smooth tau panel, >= 16
};

// Observed-data log-likelihood: per segment, log of the tau-integral of
// exp(cond_loglik) against the gamma duration density.  The integrand is
// piecewise smooth in tau with breaks at the observed gaps and at E - T_K;
// quadrature panels never straddle a break, and the region beyond the last
// break (where the integrand is constant in tau) is integrated in closed
// form against the gamma tail.
double marginal_loglik(const LikelihoodContext& ctx, const ModelSpec& theta);
double marginal_loglik_segment(const ModelSpec& theta, const Segment& seg,
                               int quadrature_nodes = 64);

// Complete-data log-likelihood: sum of cond_loglik plus the gamma log-density
// of each segment's tau.
double full_loglik(const ModelSpec& spec, const std::vector<Segment>& segments,
                   const std::vector<double>& taus);

namespace detail {

// Prefix-integrated smooth baseline so repeated interval integrals cost a
// handful of rate evaluations instead of an adaptive quadrature each.
class LdeCum {
 public:
  LdeCum() = default;
  LdeCum(const LogDoubleExpBaseline& b, double t_max);
  bool valid() const { return h_ > 0.0; }
  double integral(double a, double b) const;

 private:
  double value_at(double x) const;
  LogDoubleExpBaseline b_{};
  double h_ = 0.0;
  double t_max_ = 0.0;
  std::vector<double> prefix_;
};

// Per-theta evaluation context.  t_max > 0 builds the prefix caches (worth
// it when one theta is evaluated against many (segment, tau) pairs);
// t_max = 0 falls back to exact adaptive quadrature per call.
class Evaluator {
 public:
  Evaluator(const ModelSpec& spec, double t_max);
  double cond_loglik(const Segment& seg, double tau,
                     CondDiagnostics* diag = nullptr) const;
  const ModelSpec& spec() const { return spec_; }

 private:
  double reg_integral(double a, double b) const;
  double hot_integral(double a, double b) const;

  ModelSpec spec_;
  bool prop_ = false;
  double nu_ = 0.0;
  bool reg_cached_ = false, hot_cached_ = false;
  LdeCum reg_cum_, hot_cum_;
};

// Largest tau at which cond_loglik still changes: the longest gap to the
// next event or to E.  Beyond it every hot window is complete.
double tau_const_bound(const Segment& seg);

// Sorted unique tau breakpoints in (0, tau_const]: gaps, the censored tail
// gap, and (for piecewise baselines) cut crossings inside windows.
std::vector<double> tau_breakpoints(const ModelSpec& spec, const Segment& seg);

}  // namespace detail

}  // namespace hotstate
