#include "hotstate/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hotstate/errors.hpp"
#include "hotstate/rng.hpp"

namespace hotstate {

namespace {

std::string match_tag(std::int64_t id) {
  return "match " + std::to_string(id);
}

// 17 significant digits keep doubles round-trip exact through text; a bare
// integer mantissa gets a fractional part appended so times always carry
// decimals.
std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  std::string s = os.str();
  if (s.find_first_of(".eE") == std::string::npos &&
      s.find_first_of("0123456789") != std::string::npos) {
    s += ".000";
  }
  return s;
}

double parse_number(const std::string& field, int line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("line " + std::to_string(line) +
                                ": expected a number, got \"" + field + "\"");
  return v;
}

std::int64_t parse_integer(const std::string& field, int line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("line " + std::to_string(line) +
                                ": expected an integer, got \"" + field +
                                "\"");
  return static_cast<std::int64_t>(v);
}

void require_empty(const std::string& field, int line, const char* what) {
  if (!field.empty())
    throw std::invalid_argument("line " + std::to_string(line) + ": field " +
                                what + " must be empty for this record kind");
}

constexpr const char* kHeader =
    "kind,match_id,segment_index,E,X1,X2,X3,X4,time";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void sort_canonical(SegmentTable& table) {
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SegmentRow& a, const SegmentRow& b) {
              if (a.id.match_id != b.id.match_id)
                return a.id.match_id < b.id.match_id;
              return a.id.segment_index < b.id.segment_index;
            });
  for (auto& row : table.rows) std::sort(row.events.begin(), row.events.end());
}

void validate_table(const SegmentTable& table) {
  for (const auto& row : table.rows) {
    const std::string tag = "segment " + row.id.str();
    if (!(row.duration > 0.0) || !std::isfinite(row.duration))
      throw std::invalid_argument(tag + ": window length must be positive");
    for (double v : row.x)
      if (!std::isfinite(v))
        throw std::invalid_argument(tag + ": non-finite covariate");
    for (std::size_t k = 0; k < row.events.size(); ++k) {
      const double e = row.events[k];
      if (!(e > 0.0) || e > row.duration || !std::isfinite(e))
        throw std::invalid_argument(tag + ": event time " + format_number(e) +
                                    " outside (0, E]");
      if (k > 0 && e == row.events[k - 1])
        throw std::invalid_argument(tag + ": duplicate event time " +
                                    format_number(e));
    }
  }
}

SegmentTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw IoError("cannot read header of " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw std::invalid_argument("line 1: expected header \"" +
                                std::string(kHeader) + "\"");

  SegmentTable table;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> index;
  struct PendingEvent {
    int line;
    std::int64_t match_id;
    std::int64_t segment_index;
    double time;
  };
  std::vector<PendingEvent> pending;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 9 fields, got " +
                                  std::to_string(f.size()));
    const std::int64_t match_id = parse_integer(f[1], lineno);
    const std::int64_t seg_idx = parse_integer(f[2], lineno);
    if (f[0] == "segment") {
      require_empty(f[8], lineno, "time");
      SegmentRow row;
      row.id.match_id = match_id;
      row.id.segment_index = static_cast<int>(seg_idx);
      row.duration = parse_number(f[3], lineno);
      for (int j = 0; j < 4; ++j) row.x[j] = parse_number(f[4 + j], lineno);
      const auto key = std::make_pair(match_id, seg_idx);
      if (!index.emplace(key, table.rows.size()).second)
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": duplicate segment " + row.id.str());
      table.rows.push_back(std::move(row));
    } else if (f[0] == "event") {
      for (int j = 3; j < 8; ++j) require_empty(f[j], lineno, "E/X1..X4");
      pending.push_back(
          {lineno, match_id, seg_idx, parse_number(f[8], lineno)});
    } else {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": unknown record kind \"" + f[0] + "\"");
    }
  }

  for (const auto& ev : pending) {
    const auto it = index.find({ev.match_id, ev.segment_index});
    if (it == index.end())
      throw std::invalid_argument(
          "line " + std::to_string(ev.line) +
          ": event references unknown segment " + std::to_string(ev.match_id) +
          ":" + std::to_string(ev.segment_index));
    table.rows[it->second].events.push_back(ev.time);
  }

  sort_canonical(table);
  validate_table(table);
  return table;
}

SegmentTable read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }

  SegmentTable table;
  try {
    for (const auto& js : doc.at("segments")) {
      SegmentRow row;
      row.id.match_id = js.at("match_id").get<std::int64_t>();
      row.id.segment_index = js.at("segment_index").get<int>();
      row.duration = js.at("E").get<double>();
      const auto& x = js.at("x");
      if (x.size() != 4)
        throw std::invalid_argument("segment " + row.id.str() +
                                    ": x must have 4 entries");
      for (int j = 0; j < 4; ++j) row.x[j] = x.at(j).get<double>();
      for (const auto& e : js.at("events"))
        row.events.push_back(e.get<double>());
      table.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }

  sort_canonical(table);
  validate_table(table);
  return table;
}

void write_csv(const SegmentTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kHeader << "\n";
  for (const auto& row : table.rows) {
    out << "segment," << row.id.match_id << ',' << row.id.segment_index << ','
        << format_number(row.duration);
    for (double v : row.x) out << ',' << format_number(v);
    out << ",\n";
    for (double e : row.events) {
      out << "event," << row.id.match_id << ',' << row.id.segment_index
          << ",,,,,," << format_number(e) << "\n";
    }
  }
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

void write_json(const SegmentTable& table, const std::string& path) {
  nlohmann::json doc;
  doc["segments"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json js;
    js["match_id"] = row.id.match_id;
    js["segment_index"] = row.id.segment_index;
    js["E"] = row.duration;
    js["x"] = row.x;
    js["events"] = row.events;
    doc["segments"].push_back(std::move(js));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

bool has_json_extension(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

}  // namespace

SegmentTable build_segments(const MatchLog& log, Team team) {
  const std::string tag = match_tag(log.match_id);
  if (log.halves.empty())
    throw std::invalid_argument(tag + ": no half boundaries");
  for (std::size_t h = 0; h < log.halves.size(); ++h) {
    const auto& half = log.halves[h];
    if (!(half.start >= 0.0) || !(half.end > half.start))
      throw std::invalid_argument(tag + ": half " + std::to_string(h + 1) +
                                  " has an empty or negative time range");
    if (h > 0 && half.start < log.halves[h - 1].end)
      throw std::invalid_argument(tag + ": half " + std::to_string(h + 1) +
                                  " overlaps the previous half");
  }

  // Locate every goal and corner inside a half; strictly after the half
  // start, up to and including the half end.
  auto half_of = [&](double t) -> int {
    for (std::size_t h = 0; h < log.halves.size(); ++h)
      if (t > log.halves[h].start && t <= log.halves[h].end)
        return static_cast<int>(h);
    return -1;
  };

  std::vector<std::vector<GoalEvent>> goals_in(log.halves.size());
  for (const auto& g : log.goals) {
    const int h = half_of(g.time);
    if (h < 0)
      throw std::invalid_argument(tag + ": goal at " + format_number(g.time) +
                                  " outside any half");
    goals_in[h].push_back(g);
  }
  std::vector<std::vector<double>> corners_in(log.halves.size());
  for (const auto& c : log.corners) {
    if (c.side != team) continue;
    const int h = half_of(c.time);
    if (h < 0)
      throw std::invalid_argument(tag + ": corner at " +
                                  format_number(c.time) + " outside any half");
    corners_in[h].push_back(c.time);
  }

  SegmentTable table;
  int next_index = 1;
  int goal_diff = 0;  // analyzed team minus opponent, in play order

  for (std::size_t h = 0; h < log.halves.size(); ++h) {
    auto& goals = goals_in[h];
    std::stable_sort(goals.begin(), goals.end(),
                     [](const GoalEvent& a, const GoalEvent& b) {
                       return a.time < b.time;
                     });
    for (std::size_t k = 1; k < goals.size(); ++k)
      if (goals[k].time == goals[k - 1].time)
        throw std::invalid_argument(tag + ": duplicate goal time " +
                                    format_number(goals[k].time));
    auto& corners = corners_in[h];
    std::sort(corners.begin(), corners.end());

    const double half_start = log.halves[h].start;
    std::size_t consumed = 0;  // goals of this half already counted in X2

    auto emit = [&](double s, double e, bool by_goal) {
      while (consumed < goals.size() && goals[consumed].time < s) {
        goal_diff += goals[consumed].side == team ? 1 : -1;
        ++consumed;
      }
      SegmentRow row;
      row.id.match_id = log.match_id;
      row.id.segment_index = next_index++;
      row.duration = e - s;
      row.x[0] = h >= 1 ? 1.0 : 0.0;
      row.x[1] = static_cast<double>(goal_diff);
      row.x[2] = by_goal ? 1.0 : 0.0;
      row.x[3] = s - half_start;
      const auto lo = std::upper_bound(corners.begin(), corners.end(), s);
      const auto hi = std::upper_bound(corners.begin(), corners.end(), e);
      for (auto it = lo; it != hi; ++it) {
        const double t = *it - s;
        if (!row.events.empty() && t == row.events.back())
          throw std::invalid_argument("segment " + row.id.str() +
                                      ": duplicate corner time " +
                                      format_number(*it));
        row.events.push_back(t);
      }
      table.rows.push_back(std::move(row));
    };

    double start = half_start;
    bool by_goal = false;
    for (const auto& g : goals) {
      emit(start, g.time, by_goal);
      start = g.time;
      by_goal = true;
    }
    // A goal exactly at the half end closes the half; no empty trailing
    // window is emitted.
    if (log.halves[h].end > start) emit(start, log.halves[h].end, by_goal);

    for (; consumed < goals.size(); ++consumed)
      goal_diff += goals[consumed].side == team ? 1 : -1;
  }

  validate_table(table);
  return table;
}

SegmentTable read_dataset(const std::string& path) {
  return has_json_extension(path) ? read_json(path) : read_csv(path);
}

void write_dataset(const SegmentTable& table, const std::string& path) {
  SegmentTable canonical = table;
  sort_canonical(canonical);
  validate_table(canonical);
  if (has_json_extension(path))
    write_json(canonical, path);
  else
    write_csv(canonical, path);
}

std::vector<double> CovariateSelection::evaluate(const SegmentRow& row) const {
  std::vector<double> z(factors.size());
  for (std::size_t j = 0; j < factors.size(); ++j) {
    double v = 1.0;
    for (int idx : factors[j]) v *= row.x[idx];
    z[j] = v;
  }
  return z;
}

CovariateSelection parse_covariates(const std::vector<std::string>& terms) {
  CovariateSelection sel;
  for (const auto& term : terms) {
    std::vector<int> factors;
    std::size_t begin = 0;
    while (true) {
      const std::size_t star = term.find('*', begin);
      const std::string piece =
          star == std::string::npos ? term.substr(begin)
                                    : term.substr(begin, star - begin);
      if (piece.size() == 2 && piece[0] == 'X' && piece[1] >= '1' &&
          piece[1] <= '4') {
        factors.push_back(piece[1] - '1');
      } else {
        throw std::invalid_argument("unknown covariate \"" + piece +
                                    "\" in term \"" + term +
                                    "\" (expected X1..X4)");
      }
      if (star == std::string::npos) break;
      begin = star + 1;
    }
    sel.names.push_back(term);
    sel.factors.push_back(std::move(factors));
  }
  return sel;
}

std::vector<Segment> to_segments(const SegmentTable& table,
                                 const CovariateSelection& selection) {
  std::vector<Segment> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Segment seg;
    seg.id = row.id;
    seg.duration = row.duration;
    seg.covariates = selection.evaluate(row);
    seg.events = row.events;
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<MatchLog> generate_season_skeleton(const SeasonPlanConfig& cfg) {
  if (cfg.matches < 1)
    throw std::invalid_argument("season skeleton: matches must be >= 1");
  if (!(cfg.half_length_mean > 0.0) || cfg.half_length_spread < 0.0 ||
      cfg.half_length_spread >= cfg.half_length_mean)
    throw std::invalid_argument(
        "season skeleton: need 0 <= spread < mean half length");
  if (cfg.goals_per_minute < 0.0)
    throw std::invalid_argument("season skeleton: negative goal rate");
  if (cfg.home_goal_share < 0.0 || cfg.home_goal_share > 1.0)
    throw std::invalid_argument("season skeleton: goal share outside [0,1]");

  std::vector<MatchLog> season;
  season.reserve(static_cast<std::size_t>(cfg.matches));
  for (int m = 0; m < cfg.matches; ++m) {
    Rng rng = Rng::substream(cfg.seed, 0x5EA0u, static_cast<std::uint64_t>(m));
    MatchLog log;
    log.match_id = m + 1;
    double clock = 0.0;
    for (int h = 0; h < 2; ++h) {
      const double len =
          cfg.half_length_mean +
          cfg.half_length_spread * (2.0 * rng.uniform() - 1.0);
      log.halves.push_back({clock, clock + len});
      clock += len;
    }
    if (cfg.goals_per_minute > 0.0) {
      for (const auto& half : log.halves) {
        double t = half.start;
        for (;;) {
          t += rng.exponential(cfg.goals_per_minute);
          if (t >= half.end) break;  // goals stay strictly inside the half
          const Team side =
              rng.uniform() < cfg.home_goal_share ? Team::Home : Team::Away;
          log.goals.push_back({t, side});
        }
      }
    }
    season.push_back(std::move(log));
  }
  return season;
}

}  // namespace hotstate
