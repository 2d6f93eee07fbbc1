#include "hotstate/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "hotstate/inference.hpp"

namespace hotstate {

namespace {

double branch_mix(const ModelSpec& spec, const std::vector<double>& z,
                  double u, double p_hot) {
  const double reg = regular_intensity(spec, z, u);
  if (p_hot <= 0.0) return reg;
  return hot_intensity(spec, z, u) * p_hot + reg * (1.0 - p_hot);
}

// History restricted to (0, upto]: the conditioning data for the filtered
// posterior at time upto.
Segment truncate_history(const Segment& history, double upto) {
  Segment trimmed;
  trimmed.id = history.id;
  trimmed.duration = upto;
  trimmed.covariates = history.covariates;
  for (double e : history.events) {
    if (e <= upto) trimmed.events.push_back(e);
  }
  return trimmed;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void accumulate_clusters(const std::vector<double>& events, double threshold,
                         std::map<int, double>& counts, double& total) {
  if (events.empty()) return;
  int size = 1;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (!(events[i] > events[i - 1]))
      throw std::invalid_argument("cluster_pmf: events must be strictly ascending");
    if (events[i] - events[i - 1] <= threshold) {
      ++size;
    } else {
      counts[size] += 1.0;
      total += 1.0;
      size = 1;
    }
  }
  counts[size] += 1.0;
  total += 1.0;
}

}  // namespace

PredictionCurve predict_intensity(const ModelSpec& spec, const Segment& history,
                                  double query_time,
                                  const std::vector<double>& grid,
                                  std::optional<double> fixed_tau,
                                  int grid_cells) {
  validate(spec);
  validate(history);
  if (!fixed_tau) validate(spec.tau_dist);
  if (grid.empty()) throw std::invalid_argument("predict_intensity: empty grid");
  if (!(query_time > 0.0) || query_time > history.duration)
    throw std::invalid_argument(
        "predict_intensity: query time must lie in (0, E]");
  if (!history.events.empty() && history.events.back() > query_time)
    throw std::invalid_argument(
        "predict_intensity: history contains events after the query time");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || grid[i] > history.duration)
      throw std::invalid_argument("predict_intensity: grid must lie in (0, E]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument(
          "predict_intensity: grid must be strictly ascending");
  }

  PredictionCurve curve;
  curve.query_time = query_time;
  curve.grid = grid;
  curve.intensity.resize(grid.size());
  curve.first_predicted = grid.size();

  const bool have_event = !history.events.empty();
  const double t_last = have_event ? history.events.back() : 0.0;
  // One posterior serves the whole predictive range: it conditions on the
  // data seen by query_time, which does not change with u.
  std::unique_ptr<TauPosterior> pred_post;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i];
    if (u <= query_time) {
      // Realized intensity with tau averaged over the posterior given the
      // history strictly before u; later observations never touch this.
      std::size_t k = 0;
      while (k < history.events.size() && history.events[k] < u) ++k;
      if (k == 0) {
        curve.intensity[i] = regular_intensity(spec, history.covariates, u);
        continue;
      }
      const double thr = u - history.events[k - 1];
      double p_hot;
      if (fixed_tau) {
        p_hot = thr <= *fixed_tau ? 1.0 : 0.0;
      } else {
        const TauPosterior post(spec, truncate_history(history, u), grid_cells);
        p_hot = 1.0 - post.cdf(thr);
      }
      curve.intensity[i] = branch_mix(spec, history.covariates, u, p_hot);
    } else {
      if (curve.first_predicted == grid.size()) curve.first_predicted = i;
      if (!have_event) {
        curve.intensity[i] = regular_intensity(spec, history.covariates, u);
        continue;
      }
      const double thr = u - t_last;
      double p_hot;
      if (fixed_tau) {
        p_hot = thr <= *fixed_tau ? 1.0 : 0.0;
      } else {
        if (!pred_post)
          pred_post = std::make_unique<TauPosterior>(
              spec, truncate_history(history, query_time), grid_cells);
        p_hot = 1.0 - pred_post->cdf(thr);
      }
      curve.intensity[i] = branch_mix(spec, history.covariates, u, p_hot);
    }
  }
  return curve;
}

ClusterPmf cluster_pmf(const std::vector<double>& events, double threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("cluster_pmf: threshold must be > 0");
  ClusterPmf out;
  out.threshold = threshold;
  std::map<int, double> counts;
  double total = 0.0;
  accumulate_clusters(events, threshold, counts, total);
  for (auto& [k, v] : counts) out.pmf[k] = v / total;
  return out;
}

ClusterPmf cluster_pmf(const std::vector<Segment>& segments, double threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("cluster_pmf: threshold must be > 0");
  ClusterPmf out;
  out.threshold = threshold;
  std::map<int, double> counts;
  double total = 0.0;
  for (const auto& seg : segments)
    accumulate_clusters(seg.events, threshold, counts, total);
  for (auto& [k, v] : counts) out.pmf[k] = v / total;
  return out;
}

SeasonSummary season_summaries(
    const std::vector<std::vector<Segment>>& datasets) {
  if (datasets.empty())
    throw std::invalid_argument("season_summaries: need at least one dataset");

  SummaryMetric per_match{"events_per_match", {}, 0, 0, 0};
  SummaryMetric per_segment{"events_per_segment", {}, 0, 0, 0};
  SummaryMetric first10{"first10_per_match", {}, 0, 0, 0};

  for (const auto& dataset : datasets) {
    std::map<std::int64_t, double> match_clock;
    std::map<std::int64_t, double> match_first10;
    double events = 0.0, first10_total = 0.0;
    // Segments appear in within-match order, so the running duration sum
    // recovers each segment's start on the match clock.
    for (const auto& seg : dataset) {
      double& clock = match_clock[seg.id.match_id];
      double& f10 = match_first10[seg.id.match_id];
      for (double e : seg.events) {
        events += 1.0;
        if (clock + e <= 10.0) f10 += 1.0;
      }
      clock += seg.duration;
    }
    for (const auto& [id, v] : match_first10) first10_total += v;
    const double matches = static_cast<double>(match_clock.size());
    const double segments = static_cast<double>(dataset.size());
    per_match.per_replication.push_back(matches > 0 ? events / matches : 0.0);
    per_segment.per_replication.push_back(segments > 0 ? events / segments
                                                       : 0.0);
    first10.per_replication.push_back(matches > 0 ? first10_total / matches
                                                  : 0.0);
  }

  for (SummaryMetric* m : {&per_match, &per_segment, &first10}) {
    double acc = 0.0;
    for (double v : m->per_replication) acc += v;
    m->mean = acc / static_cast<double>(m->per_replication.size());
    m->lo = percentile(m->per_replication, 0.025);
    m->hi = percentile(m->per_replication, 0.975);
  }

  SeasonSummary out;
  out.metrics = {per_match, per_segment, first10};
  return out;
}

}  // namespace hotstate
