#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hotstate/process_model.hpp"

namespace hotstate {

struct PredictionCurve {
  double query_time = 0.0;
  std::vector<double> grid;       // strictly ascending, within (0, E]
  std::vector<double> intensity;  // one value per grid point
  std::size_t first_predicted = 0;  // grid index of the first u > query_time
};

// Intensity curve around a partially observed segment.  At u <= query_time
// the value is the realized intensity averaged over the tau posterior given
// the history up to u (so appending a later event never changes this part);
// at u > query_time it is the no-future-event predictive mixture
//   lambda_hot(u) P(tau >= u - T_last | data) + lambda_reg(u) P(tau < ...)
// with the posterior conditioned on the history up to query_time.  A
// supplied fixed_tau replaces the posterior by a point mass.
PredictionCurve predict_intensity(const ModelSpec& spec, const Segment& history,
                                  double query_time,
                                  const std::vector<double>& grid,
                                  std::optional<double> fixed_tau = std::nullopt,
                                  int grid_cells = 512);

struct ClusterPmf {
  double threshold = 0.0;
  std::map<int, double> pmf;  // cluster size -> probability
};

// Consecutive events at gaps <= threshold form one cluster; returns the
// empirical size distribution.
ClusterPmf cluster_pmf(const std::vector<double>& events, double threshold);
// Pooled over segments (clusters never span segment boundaries).
ClusterPmf cluster_pmf(const std::vector<Segment>& segments, double threshold);

struct SummaryMetric {
  std::string name;
  std::vector<double> per_replication;
  double mean = 0.0;
  double lo = 0.0;  // 2.5% empirical percentile across replications
  double hi = 0.0;  // 97.5%
};

struct SeasonSummary {
  std::vector<SummaryMetric> metrics;
};

// Per-replication means of events per match, events per segment, and events
// inside the first 10 match minutes, with cross-replication percentile
// bands.  Match time is reconstructed as the running sum of earlier segment
// durations within the match.
SeasonSummary season_summaries(const std::vector<std::vector<Segment>>& datasets);

}  // namespace hotstate
