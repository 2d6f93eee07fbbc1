#pragma once

#include <cstddef>
#include <vector>

#include "hotstate/process_model.hpp"

// Fast path for constant / piecewise-constant branch baselines: the
// complete-data log-likelihood is linear in a small vector of per-segment
// statistics (state exposure and event counts per baseline piece, tau,
// log tau), so Monte Carlo averages over tau draws collapse into averaged
// statistics and every objective evaluation afterwards is O(pieces).

namespace hotstate::detail {

bool collapsible(const ModelSpec& spec);

// Cuts / levels of a constant or piecewise-constant baseline, viewing a
// constant one as a single piece on [0, inf).
std::vector<double> grid_cuts(const BaselineSpec& b);
std::vector<double> grid_levels(const BaselineSpec& b);

struct SegTauStats {
  std::vector<double> reg_time;    // regular-state exposure per regular piece
  std::vector<double> hot_time;    // hot-state exposure per hot piece
  std::vector<double> reg_events;  // counts; fractional once averaged
  std::vector<double> hot_events;
  double tau = 0.0;
  double log_tau = 0.0;

  void resize(std::size_t reg_pieces, std::size_t hot_pieces);
  void add_scaled(const SegTauStats& other, double w);
};

// Per-segment geometry fixed across tau draws: event piece indices, gaps,
// and total per-piece exposure.  stats() then costs O(events * pieces).
class CollapsedSegment {
 public:
  CollapsedSegment(const ModelSpec& spec, const Segment& seg);

  void stats(double tau, SegTauStats& out) const;
  std::size_t reg_pieces() const { return reg_cuts_.size(); }
  std::size_t hot_pieces() const { return prop_ ? reg_cuts_.size() : hot_cuts_.size(); }

 private:
  bool prop_ = false;
  std::vector<double> reg_cuts_, hot_cuts_;
  std::vector<double> total_reg_;             // exposure of (0, E] per regular piece
  std::vector<double> events_, gap_prev_, d_next_;
  std::vector<int> reg_piece_, hot_piece_;
};

// Levels, their logs and the branch coefficients of one theta, shared
// across segments within an objective evaluation.
class CollapsedModel {
 public:
  explicit CollapsedModel(const ModelSpec& spec);

  // Conditional log-likelihood from statistics; equals cond_loglik exactly
  // when the statistics come from CollapsedSegment::stats at the same tau.
  double cond(const std::vector<double>& z, const SegTauStats& s) const;
  // Gamma log-density contribution from the (averaged) tau statistics.
  double tau_term(const SegTauStats& s) const;

 private:
  bool prop_ = false;
  double nu_ = 0.0;
  std::vector<double> reg_levels_, log_reg_levels_;
  std::vector<double> hot_levels_, log_hot_levels_;
  std::vector<double> beta_reg_;
  const std::vector<double>* beta_hot_ = nullptr;  // into owned storage
  std::vector<double> beta_hot_store_;
  double shape_ = 0.0, rate_ = 0.0, log_rate_ = 0.0, lgamma_shape_ = 0.0;
};

}  // namespace hotstate::detail
