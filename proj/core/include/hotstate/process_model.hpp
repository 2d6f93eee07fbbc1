#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hotstate {

// ---- baselines -------------------------------------------------------

struct ConstantBaseline {
  double rate = 0.0;  // events/min
};

// log rate(t) = theta1 + theta2 * (exp(-theta3*t) - exp(-theta4*t)).
// Captures a transient rise-and-settle shape on top of exp(theta1).
struct LogDoubleExpBaseline {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;  // > 0
  double theta4 = 0.0;  // > 0
};

// Right-continuous step function.  cuts[0] must be 0; the last level
// extends past the final cut so segments longer than the cut grid stay
// well defined.
struct PiecewiseConstantBaseline {
  std::vector<double> cuts;
  std::vector<double> levels;
};

using BaselineSpec =
    std::variant<ConstantBaseline, LogDoubleExpBaseline, PiecewiseConstantBaseline>;

void validate(const BaselineSpec& b);
double baseline_rate(const BaselineSpec& b, double t);
// Exact for Constant/PiecewiseConstant; adaptive quadrature (1e-10 relative)
// for LogDoubleExp.
double baseline_integral(const BaselineSpec& b, double a, double e);
// Supremum of the rate over [a,b]; exact for all three variants (the
// LogDoubleExp rate has a single interior critical point).
double baseline_sup(const BaselineSpec& b, double a, double e);

// ---- hot-window duration law -----------------------------------------

// Gamma(shape, rate) law of the latent hot-window length.
struct HotDurationDist {
  double shape = 0.0;
  double rate = 0.0;

  double mean() const;
  double sd() const;
  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  double quantile(double p) const;           // p in [0,1)
  double quantile_upper(double q) const;     // x with survival(x) = q
};

void validate(const HotDurationDist& d);
std::pair<double, double> gamma_moments(const HotDurationDist& d);

// ---- model specification ---------------------------------------------

// Hot intensity = regular intensity * exp(nu); shares baseline and
// covariate coefficients with the regular branch.
struct ProportionalHot {
  double nu = 0.0;
};

using HotSpec = std::variant<ProportionalHot, ConstantBaseline,
                             LogDoubleExpBaseline, PiecewiseConstantBaseline>;

struct ModelSpec {
  BaselineSpec regular_baseline;
  HotSpec hot_baseline;
  std::vector<double> beta_regular;
  // Engaged only for a distinct (non-proportional) hot branch; otherwise the
  // hot branch shares beta_regular.
  std::optional<std::vector<double>> beta_hot;
  HotDurationDist tau_dist;
};

void validate(const ModelSpec& spec);
bool proportional_hot(const ModelSpec& spec);
// The hot branch as a BaselineSpec; invalid to call when proportional.
const BaselineSpec hot_baseline_spec(const ModelSpec& spec);

// ---- segments ---------------------------------------------------------

struct SegmentId {
  std::int64_t match_id = 0;
  int segment_index = 0;
  std::string str() const;
};

struct Segment {
  SegmentId id;
  double duration = 0.0;           // E; observation window (0, E]
  std::vector<double> covariates;  // model design vector Z
  std::vector<double> events;      // strictly ascending, in (0, E]
};

void validate(const Segment& seg);

// ---- hot timeline and intensities --------------------------------------

struct HotInterval {
  double lo = 0.0;  // half-open (lo, hi]
  double hi = 0.0;
};
using HotTimeline = std::vector<HotInterval>;

HotTimeline hot_timeline(const std::vector<double>& events, double tau,
                         double duration);

// State at t using history strictly before t (left-limit convention).
bool is_hot(const std::vector<double>& events, double tau, double t);

double regular_intensity(const ModelSpec& spec, const std::vector<double>& z,
                         double t);
double hot_intensity(const ModelSpec& spec, const std::vector<double>& z,
                     double t);
double intensity_at(const ModelSpec& spec, const Segment& seg, double tau,
                    double t);
double cumulative_intensity(const ModelSpec& spec, const Segment& seg,
                            double tau, double a, double b);

// exp(beta . z); throws on dimension mismatch.
double covariate_multiplier(const std::vector<double>& beta,
                            const std::vector<double>& z);

}  // namespace hotstate
