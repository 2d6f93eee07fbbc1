#include "hotstate/collapsed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace hotstate::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int piece_of(const std::vector<double>& cuts, double t) {
  // Pieces are [c_p, c_{p+1}) with the last extending to infinity.
  auto it = std::upper_bound(cuts.begin(), cuts.end(), t);
  return static_cast<int>(it - cuts.begin()) - 1;
}

// Adds the overlap of (a, b] with each piece into vec (scaled by w).
void accumulate(const std::vector<double>& cuts, double a, double b,
                std::vector<double>& vec, double w) {
  if (!(b > a)) return;
  const std::size_t n = cuts.size();
  for (std::size_t p = 0; p < n; ++p) {
    const double lo = std::max(a, cuts[p]);
    const double hi = std::min(b, p + 1 < n ? cuts[p + 1] : kInf);
    if (hi > lo) vec[p] += w * (hi - lo);
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("covariate dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

bool collapsible(const ModelSpec& spec) {
  const bool reg_ok =
      !std::holds_alternative<LogDoubleExpBaseline>(spec.regular_baseline);
  const bool hot_ok =
      !std::holds_alternative<LogDoubleExpBaseline>(spec.hot_baseline);
  return reg_ok && hot_ok;
}

std::vector<double> grid_cuts(const BaselineSpec& b) {
  if (std::holds_alternative<ConstantBaseline>(b)) return {0.0};
  if (const auto* p = std::get_if<PiecewiseConstantBaseline>(&b)) return p->cuts;
  throw std::logic_error("grid_cuts: baseline has no piece grid");
}

std::vector<double> grid_levels(const BaselineSpec& b) {
  if (const auto* c = std::get_if<ConstantBaseline>(&b)) return {c->rate};
  if (const auto* p = std::get_if<PiecewiseConstantBaseline>(&b)) return p->levels;
  throw std::logic_error("grid_levels: baseline has no piece grid");
}

void SegTauStats::resize(std::size_t reg_pieces, std::size_t hot_pieces) {
  reg_time.assign(reg_pieces, 0.0);
  hot_time.assign(hot_pieces, 0.0);
  reg_events.assign(reg_pieces, 0.0);
  hot_events.assign(hot_pieces, 0.0);
  tau = 0.0;
  log_tau = 0.0;
}

void SegTauStats::add_scaled(const SegTauStats& other, double w) {
  for (std::size_t i = 0; i < reg_time.size(); ++i) {
    reg_time[i] += w * other.reg_time[i];
    reg_events[i] += w * other.reg_events[i];
  }
  for (std::size_t i = 0; i < hot_time.size(); ++i) {
    hot_time[i] += w * other.hot_time[i];
    hot_events[i] += w * other.hot_events[i];
  }
  tau += w * other.tau;
  log_tau += w * other.log_tau;
}

CollapsedSegment::CollapsedSegment(const ModelSpec& spec, const Segment& seg) {
  if (!collapsible(spec))
    throw std::logic_error("CollapsedSegment: spec has a smooth baseline");
  prop_ = proportional_hot(spec);
  reg_cuts_ = grid_cuts(spec.regular_baseline);
  if (!prop_) hot_cuts_ = grid_cuts(hot_baseline_spec(spec));

  total_reg_.assign(reg_cuts_.size(), 0.0);
  accumulate(reg_cuts_, 0.0, seg.duration, total_reg_, 1.0);

  events_ = seg.events;
  const std::size_t k = events_.size();
  gap_prev_.resize(k);
  d_next_.resize(k);
  reg_piece_.resize(k);
  hot_piece_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    gap_prev_[i] = i == 0 ? kInf : events_[i] - events_[i - 1];
    d_next_[i] = (i + 1 < k ? events_[i + 1] : seg.duration) - events_[i];
    reg_piece_[i] = piece_of(reg_cuts_, events_[i]);
    hot_piece_[i] = prop_ ? reg_piece_[i] : piece_of(hot_cuts_, events_[i]);
  }
}

void CollapsedSegment::stats(double tau, SegTauStats& out) const {
  out.resize(reg_pieces(), hot_pieces());
  out.reg_time = total_reg_;
  out.tau = tau;
  out.log_tau = std::log(tau);

  for (std::size_t i = 0; i < events_.size(); ++i) {
    const double len = std::min(tau, d_next_[i]);
    if (len > 0.0) {
      accumulate(reg_cuts_, events_[i], events_[i] + len, out.reg_time, -1.0);
      if (prop_)
        accumulate(reg_cuts_, events_[i], events_[i] + len, out.hot_time, 1.0);
      else
        accumulate(hot_cuts_, events_[i], events_[i] + len, out.hot_time, 1.0);
    }
    if (gap_prev_[i] <= tau)
      out.hot_events[hot_piece_[i]] += 1.0;
    else
      out.reg_events[reg_piece_[i]] += 1.0;
  }
}

CollapsedModel::CollapsedModel(const ModelSpec& spec) {
  if (!collapsible(spec))
    throw std::logic_error("CollapsedModel: spec has a smooth baseline");
  prop_ = proportional_hot(spec);
  reg_levels_ = grid_levels(spec.regular_baseline);
  if (prop_) {
    nu_ = std::get<ProportionalHot>(spec.hot_baseline).nu;
    hot_levels_ = reg_levels_;
  } else {
    hot_levels_ = grid_levels(hot_baseline_spec(spec));
  }
  auto logs = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
    return out;
  };
  log_reg_levels_ = logs(reg_levels_);
  log_hot_levels_ = logs(hot_levels_);

  beta_reg_ = spec.beta_regular;
  if (prop_ || !spec.beta_hot) {
    beta_hot_ = &beta_reg_;
  } else {
    beta_hot_store_ = *spec.beta_hot;
    beta_hot_ = &beta_hot_store_;
  }

  shape_ = spec.tau_dist.shape;
  rate_ = spec.tau_dist.rate;
  log_rate_ = std::log(rate_);
  lgamma_shape_ = boost::math::lgamma(shape_);
}

double CollapsedModel::cond(const std::vector<double>& z,
                            const SegTauStats& s) const {
  const double b0z = dot(beta_reg_, z);
  const double b1z = prop_ ? b0z + nu_ : dot(*beta_hot_, z);
  const double e0 = std::exp(b0z), e1 = std::exp(b1z);

  double ll = 0.0;
  for (std::size_t p = 0; p < reg_levels_.size(); ++p) {
    ll += s.reg_events[p] * (log_reg_levels_[p] + b0z);
    ll -= e0 * reg_levels_[p] * s.reg_time[p];
  }
  for (std::size_t q = 0; q < hot_levels_.size(); ++q) {
    ll += s.hot_events[q] * (log_hot_levels_[q] + b1z);
    ll -= e1 * hot_levels_[q] * s.hot_time[q];
  }
  return ll;
}

double CollapsedModel::tau_term(const SegTauStats& s) const {
  return shape_ * log_rate_ - lgamma_shape_ + (shape_ - 1.0) * s.log_tau -
         rate_ * s.tau;
}

}  // namespace hotstate::detail
