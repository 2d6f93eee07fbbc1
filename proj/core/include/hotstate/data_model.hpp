#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hotstate/process_model.hpp"

namespace hotstate {

enum class Team { Home, Away };

// Raw match event view: half boundaries in match minutes plus timestamped
// goals and corners for both sides.
struct HalfBoundary {
  double start = 0.0;
  double end = 0.0;
};

struct GoalEvent {
  double time = 0.0;
  Team side = Team::Home;
};

struct CornerEvent {
  double time = 0.0;
  Team side = Team::Home;
};

struct MatchLog {
  std::int64_t match_id = 0;
  std::vector<HalfBoundary> halves;  // ordered, non-overlapping
  std::vector<GoalEvent> goals;
  std::vector<CornerEvent> corners;
};

// One observation window between a start event (half start or goal) and the
// next terminal event (goal or half end), with event times re-zeroed to the
// window.  Base covariates:
//   x[0] second-half indicator
//   x[1] goal difference for the analyzed team at the window start
//        (goals strictly earlier in play; the trigger goal is excluded)
//   x[2] 1 when the window was started by a goal
//   x[3] start offset from the half start, minutes
struct SegmentRow {
  SegmentId id;
  double duration = 0.0;
  std::array<double, 4> x{};
  std::vector<double> events;
};

struct SegmentTable {
  std::vector<SegmentRow> rows;
};

// Partition a match into segments and keep the chosen team's corners.
// Throws std::invalid_argument on overlapping halves, goals or corners
// outside any half, or duplicate timestamps, naming the offending match.
SegmentTable build_segments(const MatchLog& log, Team team);

// Delimited text with a header (record kinds "segment" and "event"), or a
// JSON mirror when the path ends in ".json".  Tables are written in
// canonical (match, segment) order with round-trip-exact number formatting;
// reading a written table reproduces it bitwise.  Missing or unwritable
// files raise IoError; malformed content raises std::invalid_argument with
// the line number.
SegmentTable read_dataset(const std::string& path);
void write_dataset(const SegmentTable& table, const std::string& path);

// Design-vector selection over the base covariates: terms are "X1".."X4"
// or '*'-joined products such as "X4*X2".
struct CovariateSelection {
  std::vector<std::string> names;
  std::vector<std::vector<int>> factors;  // indices into SegmentRow::x

  std::vector<double> evaluate(const SegmentRow& row) const;
};

CovariateSelection parse_covariates(const std::vector<std::string>& terms);

std::vector<Segment> to_segments(const SegmentTable& table,
                                 const CovariateSelection& selection);

// Synthetic season scaffold: jittered half lengths and Poisson goal times,
// no corners.  Feeding the result through build_segments yields a planning
// table for the simulator (segment windows plus covariates).
struct SeasonPlanConfig {
  int matches = 233;
  double half_length_mean = 47.0;
  double half_length_spread = 2.0;  // uniform jitter, minutes
  double goals_per_minute = 0.032;
  double home_goal_share = 0.5;
  std::uint64_t seed = 1;
};

std::vector<MatchLog> generate_season_skeleton(const SeasonPlanConfig& cfg);

}  // namespace hotstate
