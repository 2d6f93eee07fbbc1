// Command-line front end: fit / simulate / predict / summarize / se.
// Every command is a pure function of (input files, config, seed); artifacts
// are written with round-trip-exact number formatting so reruns are bitwise
// reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hotstate/analytics.hpp"
#include "hotstate/data_model.hpp"
#include "hotstate/errors.hpp"
#include "hotstate/inference.hpp"
#include "hotstate/param_pack.hpp"
#include "hotstate/process_model.hpp"
#include "hotstate/simulate.hpp"

namespace hs = hotstate;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::string data;
  std::string out = "out";
  std::string model = "a";
  std::uint64_t seed = 1;
  int threads = 1;
  json cfg = json::object();
};

json load_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw hs::IoError(std::string("cannot open ") + what + " " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + " " + path + ": " +
                                e.what());
  }
}

// Flags win over config keys; config keys win over built-in defaults.
void resolve_common(const CLI::App* cmd, Common& c) {
  if (!c.config_path.empty()) c.cfg = load_json(c.config_path, "config");
  if (!c.cfg.is_object())
    throw std::invalid_argument("config root must be a JSON object");
  if (!cmd->count("--data")) c.data = c.cfg.value("data", c.data);
  if (!cmd->count("--out")) c.out = c.cfg.value("out", c.out);
  if (!cmd->count("--model")) c.model = c.cfg.value("model", c.model);
  if (!cmd->count("--seed")) c.seed = c.cfg.value("seed", c.seed);
  if (!cmd->count("--threads")) c.threads = c.cfg.value("threads", c.threads);
}

std::string num_full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string num_fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw hs::IoError("cannot open " + p.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& p) {
  out.flush();
  if (!out) throw hs::IoError("write to " + p.string() + " failed");
}

// ---- model assembly -------------------------------------------------------

std::vector<double> cuts_from(const json& cfg, const char* key,
                              std::vector<double> fallback) {
  return cfg.value(key, fallback);
}

hs::ModelSpec model_skeleton(const std::string& model, std::size_t n_cov,
                             const json& cfg) {
  hs::ModelSpec spec;
  const auto reg_cuts =
      cuts_from(cfg, "cuts", {0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 27.5});
  const auto hot_cuts =
      cuts_from(cfg, "hot_cuts", {0.0, 5.0, 10.0, 15.0, 20.0, 30.0});
  if (model == "a") {
    spec.regular_baseline = hs::ConstantBaseline{0.1};
  } else if (model == "b") {
    spec.regular_baseline =
        hs::LogDoubleExpBaseline{std::log(0.1), 0.01, 0.5, 1.0};
  } else if (model == "c" || model == "d") {
    spec.regular_baseline = hs::PiecewiseConstantBaseline{
        reg_cuts, std::vector<double>(reg_cuts.size(), 0.1)};
  } else {
    throw std::invalid_argument("unknown model variant \"" + model +
                                "\" (expected a, b, c, or d)");
  }
  if (model == "d") {
    spec.hot_baseline = hs::PiecewiseConstantBaseline{
        hot_cuts, std::vector<double>(hot_cuts.size(), 0.2)};
    spec.beta_hot = std::vector<double>(n_cov, 0.0);
  } else {
    spec.hot_baseline = hs::ProportionalHot{0.7};
  }
  spec.beta_regular.assign(n_cov, 0.0);
  spec.tau_dist = hs::HotDurationDist{9.0, 4.5};
  return spec;
}

// Natural-scale slot overrides keyed by packed parameter name.
hs::ModelSpec apply_overrides(hs::ModelSpec spec, const json& over) {
  if (over.is_null()) return spec;
  if (!over.is_object())
    throw std::invalid_argument("parameter overrides must be an object");
  const hs::detail::ParamPacker packer(spec, /*tau_latent=*/true);
  for (auto it = over.begin(); it != over.end(); ++it)
    packer.set_value(spec, it.key(), it.value().get<double>());
  return spec;
}

hs::CovariateSelection selection_from(const json& cfg) {
  const auto terms = cfg.value(
      "covariates", std::vector<std::string>{"X1", "X2", "X3", "X4"});
  return hs::parse_covariates(terms);
}

hs::Team team_from(const json& cfg) {
  const std::string t = cfg.value("team", std::string("home"));
  if (t == "home") return hs::Team::Home;
  if (t == "away") return hs::Team::Away;
  throw std::invalid_argument("team must be \"home\" or \"away\", got \"" + t +
                              "\"");
}

hs::McemConfig mcem_config_from(const json& cfg, std::uint64_t seed,
                                int threads) {
  hs::McemConfig mc;
  const json m = cfg.value("mcem", json::object());
  mc.max_iters = m.value("max_iters", mc.max_iters);
  mc.tol = m.value("tol", mc.tol);
  mc.patience = m.value("patience", mc.patience);
  mc.m0 = m.value("m0", mc.m0);
  mc.m_growth = m.value("m_growth", mc.m_growth);
  mc.m_max = m.value("m_max", mc.m_max);
  mc.grid_cells = m.value("grid_cells", mc.grid_cells);
  const std::string opt = m.value("optimizer", std::string("quasi-newton"));
  if (opt == "quasi-newton")
    mc.optimizer = hs::McemConfig::Optimizer::QuasiNewton;
  else if (opt == "simplex")
    mc.optimizer = hs::McemConfig::Optimizer::Simplex;
  else
    throw std::invalid_argument(
        "mcem.optimizer must be \"quasi-newton\" or \"simplex\"");
  mc.opt_gtol = m.value("opt_gtol", mc.opt_gtol);
  mc.opt_max_iters = m.value("opt_max_iters", mc.opt_max_iters);
  mc.fd_step = m.value("fd_step", mc.fd_step);
  mc.tau_latent = m.value("tau_latent", mc.tau_latent);
  mc.fixed_tau = m.value("fixed_tau", mc.fixed_tau);
  for (const auto& name :
       m.value("fixed", std::vector<std::string>{}))
    mc.fixed.insert(name);
  mc.compute_se = m.value("compute_se", mc.compute_se);
  mc.se_samples = m.value("se_samples", mc.se_samples);
  mc.seed = seed;
  mc.threads = threads;
  return mc;
}

// ---- fit artifacts ---------------------------------------------------------

void write_params_csv(const fs::path& p, const std::vector<std::string>& names,
                      const std::vector<double>& est,
                      const std::vector<double>& se, bool se_available) {
  auto out = open_out(p);
  out << "name,estimate,se\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << ',' << num_full(est[i]) << ',';
    if (se_available) out << num_full(se[i]);
    out << '\n';
  }
  finish(out, p);
}

void write_params_txt(const fs::path& p, const hs::FitResult& fit) {
  auto out = open_out(p);
  std::size_t width = 12;
  for (const auto& n : fit.names) width = std::max(width, n.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "parameter"
      << "estimate (SE)\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << fit.names[i]
        << num_fixed(fit.estimates[i]);
    if (fit.se_available) out << " (" << num_fixed(fit.se[i]) << ")";
    out << '\n';
  }
  if (fit.tau_latent) {
    const auto [mean, sd] = hs::gamma_moments(fit.theta_hat.tau_dist);
    out << std::left << std::setw(static_cast<int>(width) + 2) << "tau_mean"
        << num_fixed(mean) << '\n';
    out << std::left << std::setw(static_cast<int>(width) + 2) << "tau_sd"
        << num_fixed(sd) << '\n';
  } else {
    out << std::left << std::setw(static_cast<int>(width) + 2) << "tau_fixed"
        << num_fixed(fit.fixed_tau) << '\n';
  }
  out << "converged: " << (fit.converged ? "yes" : "NO") << " after "
      << fit.trace.size() << " iterations\n";
  if (!fit.se_available && !fit.se_message.empty())
    out << "standard errors: " << fit.se_message << '\n';
  for (const auto& w : fit.warnings) out << "warning: " << w << '\n';
  finish(out, p);
}

void write_trace_csv(const fs::path& p, const hs::FitResult& fit) {
  auto out = open_out(p);
  out << "iteration,m_samples,q_before,q_after,rel_change";
  for (const auto& n : fit.names) out << ',' << n;
  out << '\n';
  for (const auto& it : fit.trace) {
    out << it.iteration << ',' << it.m_samples << ',' << num_full(it.q_before)
        << ',' << num_full(it.q_after) << ',' << num_full(it.rel_change);
    for (double v : it.natural) out << ',' << num_full(v);
    out << '\n';
  }
  finish(out, p);
}

void write_fit_json(const fs::path& p, const Common& c,
                    const hs::CovariateSelection& sel,
                    const hs::FitResult& fit) {
  json j;
  j["model"] = c.model;
  j["covariates"] = sel.names;
  j["cuts"] = cuts_from(c.cfg, "cuts", {0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 27.5});
  j["hot_cuts"] =
      cuts_from(c.cfg, "hot_cuts", {0.0, 5.0, 10.0, 15.0, 20.0, 30.0});
  j["names"] = fit.names;
  j["estimates"] = fit.estimates;
  j["se"] = fit.se;
  j["se_available"] = fit.se_available;
  j["se_message"] = fit.se_message;
  j["converged"] = fit.converged;
  j["warnings"] = fit.warnings;
  j["tau_latent"] = fit.tau_latent;
  j["fixed_tau"] = fit.fixed_tau;
  j["fixed"] = std::vector<std::string>(fit.fixed.begin(), fit.fixed.end());
  j["tau_shape"] = fit.theta_hat.tau_dist.shape;
  j["tau_rate"] = fit.theta_hat.tau_dist.rate;
  const hs::detail::ParamPacker full(fit.theta_hat, fit.tau_latent);
  json all = json::object();
  for (const auto& name : full.all_names())
    all[name] = full.get_value(fit.theta_hat, name);
  j["all"] = std::move(all);
  auto out = open_out(p);
  out << j.dump(2) << '\n';
  finish(out, p);
}

// Rebuild the fitted model and its packing metadata from fit.json.
hs::FitResult fit_from_json(const json& j, std::size_t n_cov) {
  json shape_cfg;
  shape_cfg["cuts"] = j.at("cuts");
  shape_cfg["hot_cuts"] = j.at("hot_cuts");
  hs::ModelSpec spec =
      model_skeleton(j.at("model").get<std::string>(), n_cov, shape_cfg);
  spec.tau_dist.shape = j.at("tau_shape").get<double>();
  spec.tau_dist.rate = j.at("tau_rate").get<double>();
  hs::FitResult fit;
  fit.tau_latent = j.at("tau_latent").get<bool>();
  fit.fixed_tau = j.at("fixed_tau").get<double>();
  for (const auto& n : j.at("fixed")) fit.fixed.insert(n.get<std::string>());
  const hs::detail::ParamPacker full(spec, fit.tau_latent);
  for (const auto& [name, value] : j.at("all").items())
    full.set_value(spec, name, value.get<double>());
  fit.theta_hat = std::move(spec);
  fit.names = j.at("names").get<std::vector<std::string>>();
  fit.estimates = j.at("estimates").get<std::vector<double>>();
  fit.converged = j.at("converged").get<bool>();
  return fit;
}

// ---- summaries -------------------------------------------------------------

void write_summary(const fs::path& dir, const hs::SeasonSummary& summary) {
  {
    const fs::path p = dir / "summary.csv";
    auto out = open_out(p);
    out << "metric,mean,p2.5,p97.5\n";
    for (const auto& m : summary.metrics)
      out << m.name << ',' << num_full(m.mean) << ',' << num_full(m.lo) << ','
          << num_full(m.hi) << '\n';
    finish(out, p);
  }
  {
    const fs::path p = dir / "summary.txt";
    auto out = open_out(p);
    out << std::left << std::setw(22) << "metric" << std::setw(10) << "mean"
        << "95% band\n";
    for (const auto& m : summary.metrics)
      out << std::left << std::setw(22) << m.name << std::setw(10)
          << num_fixed(m.mean, 2) << "(" << num_fixed(m.lo, 2) << ", "
          << num_fixed(m.hi, 2) << ")\n";
    finish(out, p);
  }
}

// ---- commands ---------------------------------------------------------------

int cmd_fit(const Common& c) {
  if (c.data.empty())
    throw std::invalid_argument("fit: --data (or config key \"data\") is required");
  const hs::SegmentTable table = hs::read_dataset(c.data);
  const auto sel = selection_from(c.cfg);
  const auto segments = hs::to_segments(table, sel);
  if (segments.empty())
    throw std::invalid_argument("fit: dataset contains no segments");

  const hs::ModelSpec skeleton = model_skeleton(c.model, sel.names.size(), c.cfg);
  hs::ModelSpec init = hs::default_init(skeleton, segments);
  init = apply_overrides(std::move(init), c.cfg.value("init", json()));
  const hs::McemConfig mc = mcem_config_from(c.cfg, c.seed, c.threads);

  const hs::FitResult fit = hs::mcem_fit(segments, init, mc);

  const fs::path dir(c.out);
  write_params_csv(dir / "params.csv", fit.names, fit.estimates, fit.se,
                   fit.se_available);
  write_params_txt(dir / "params.txt", fit);
  write_trace_csv(dir / "trace.csv", fit);
  write_fit_json(dir / "fit.json", c, sel, fit);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
  if (!fit.converged) {
    std::cerr << "fit did not converge within " << mc.max_iters
              << " iterations\n";
    return 4;
  }
  return 0;
}

int cmd_se(const Common& c) {
  const json sc = c.cfg.value("se", json::object());
  const std::string fit_path =
      sc.value("fit", (fs::path(c.out) / "fit.json").string());
  const json fj = load_json(fit_path, "fit file");
  if (c.data.empty())
    throw std::invalid_argument("se: --data (or config key \"data\") is required");

  const auto terms = fj.at("covariates").get<std::vector<std::string>>();
  const auto sel = hs::parse_covariates(terms);
  const auto segments = hs::to_segments(hs::read_dataset(c.data), sel);
  hs::FitResult fit = fit_from_json(fj, sel.names.size());
  if (!fit.converged)
    throw std::invalid_argument("se: stored fit did not converge");

  const int m = sc.value("samples", 2000);
  const int grid_cells = sc.value("grid_cells", 512);
  const hs::LouisResult lr =
      hs::louis_se(fit, segments, m, c.seed, grid_cells, c.threads);

  const fs::path p = fs::path(c.out) / "se.csv";
  auto out = open_out(p);
  out << "name,estimate,se\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    out << fit.names[i] << ',' << num_full(fit.estimates[i]) << ',';
    if (lr.available) out << num_full(lr.se[i]);
    out << '\n';
  }
  finish(out, p);
  if (!lr.available) {
    std::cerr << "standard errors unavailable: " << lr.message << '\n';
    return 3;
  }
  return 0;
}

int cmd_simulate(const Common& c) {
  const json sc = c.cfg.value("simulate", json::object());

  // Segment plan: explicit dataset file, or a synthetic season.
  hs::SegmentTable plan;
  const json plan_cfg = sc.value("plan", json::object());
  if (plan_cfg.contains("segments")) {
    plan = hs::read_dataset(plan_cfg.at("segments").get<std::string>());
  } else {
    const json g = plan_cfg.value("generator", json::object());
    hs::SeasonPlanConfig pc;
    pc.matches = g.value("matches", pc.matches);
    pc.half_length_mean = g.value("half_length_mean", pc.half_length_mean);
    pc.half_length_spread =
        g.value("half_length_spread", pc.half_length_spread);
    pc.goals_per_minute = g.value("goals_per_minute", pc.goals_per_minute);
    pc.home_goal_share = g.value("home_goal_share", pc.home_goal_share);
    pc.seed = g.value("seed", c.seed);
    const hs::Team team = team_from(c.cfg);
    for (const auto& log : hs::generate_season_skeleton(pc)) {
      auto t = hs::build_segments(log, team);
      plan.rows.insert(plan.rows.end(),
                       std::make_move_iterator(t.rows.begin()),
                       std::make_move_iterator(t.rows.end()));
    }
  }
  if (plan.rows.empty())
    throw std::invalid_argument("simulate: the segment plan is empty");

  const auto sel = selection_from(c.cfg);
  hs::ModelSpec spec = model_skeleton(c.model, sel.names.size(), c.cfg);
  spec = apply_overrides(std::move(spec), sc.value("params", json()));
  hs::validate(spec);

  hs::SimConfig sim;
  sim.spec = std::move(spec);
  if (sc.contains("tau")) {
    const json& tau = sc.at("tau");
    if (tau.is_number()) {
      sim.draw_tau = false;
      sim.fixed_tau = tau.get<double>();
    } else if (!(tau.is_string() && tau.get<std::string>() == "random")) {
      throw std::invalid_argument(
          "simulate.tau must be a number or \"random\"");
    }
  }
  sim.replications = sc.value("replications", 1);
  sim.seed = c.seed;
  sim.threads = c.threads;
  sim.plan.reserve(plan.rows.size());
  for (const auto& row : plan.rows)
    sim.plan.push_back({row.id, row.duration, sel.evaluate(row)});

  const auto datasets = hs::simulate_season(sim);

  const fs::path dir(c.out);
  hs::SegmentTable rep = plan;
  for (std::size_t r = 0; r < datasets.size(); ++r) {
    for (std::size_t j = 0; j < rep.rows.size(); ++j)
      rep.rows[j].events = datasets[r][j].events;
    char name[32];
    std::snprintf(name, sizeof name, "rep_%03d.csv", static_cast<int>(r));
    hs::write_dataset(rep, (dir / name).string());
  }
  write_summary(dir, hs::season_summaries(datasets));
  return 0;
}

int cmd_predict(const Common& c) {
  const json pc = c.cfg.value("predict", json::object());
  const auto sel = selection_from(c.cfg);

  hs::ModelSpec spec;
  if (pc.contains("fit")) {
    const json fj = load_json(pc.at("fit").get<std::string>(), "fit file");
    spec = fit_from_json(fj, sel.names.size()).theta_hat;
  } else {
    spec = model_skeleton(c.model, sel.names.size(), c.cfg);
    spec = apply_overrides(std::move(spec), pc.value("params", json()));
  }
  hs::validate(spec);

  hs::Segment history;
  if (pc.contains("history")) {
    const json h = pc.at("history");
    history.id.match_id = 0;
    history.id.segment_index = 1;
    history.duration = h.at("E").get<double>();
    history.events = h.value("events", std::vector<double>{});
    history.covariates = h.value(
        "z", std::vector<double>(spec.beta_regular.size(), 0.0));
  } else if (!c.data.empty() && pc.contains("segment")) {
    const json s = pc.at("segment");
    const auto match_id = s.at("match_id").get<std::int64_t>();
    const auto seg_idx = s.at("segment_index").get<int>();
    const hs::SegmentTable table = hs::read_dataset(c.data);
    bool found = false;
    for (const auto& row : table.rows) {
      if (row.id.match_id == match_id && row.id.segment_index == seg_idx) {
        history.id = row.id;
        history.duration = row.duration;
        history.covariates = sel.evaluate(row);
        history.events = row.events;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("predict: segment " +
                                  std::to_string(match_id) + ":" +
                                  std::to_string(seg_idx) + " not in dataset");
  } else {
    throw std::invalid_argument(
        "predict: provide predict.history inline or --data plus "
        "predict.segment");
  }

  const auto query_times = pc.value("query_times", std::vector<double>{});
  if (query_times.empty())
    throw std::invalid_argument("predict: predict.query_times is required");
  const double step = pc.value("grid_step", 0.1);
  if (!(step > 0.0))
    throw std::invalid_argument("predict: grid_step must be > 0");
  std::optional<double> fixed_tau;
  if (pc.contains("fixed_tau") && pc.at("fixed_tau").is_number())
    fixed_tau = pc.at("fixed_tau").get<double>();
  const int grid_cells = pc.value("grid_cells", 512);

  std::vector<double> grid;
  for (double u = step; u < history.duration; u += step) grid.push_back(u);
  if (grid.empty() || grid.back() < history.duration)
    grid.push_back(history.duration);

  const fs::path dir(c.out);
  {
    const fs::path p = dir / "markers.csv";
    auto out = open_out(p);
    out << "time\n";
    for (double e : history.events) out << num_full(e) << '\n';
    finish(out, p);
  }
  const fs::path index_path = dir / "curves.csv";
  auto index = open_out(index_path);
  index << "file,query_time\n";
  for (std::size_t qi = 0; qi < query_times.size(); ++qi) {
    const double q = query_times[qi];
    hs::Segment upto = history;
    while (!upto.events.empty() && upto.events.back() > q)
      upto.events.pop_back();
    const auto curve =
        hs::predict_intensity(spec, upto, q, grid, fixed_tau, grid_cells);
    char name[32];
    std::snprintf(name, sizeof name, "curve_%03d.csv", static_cast<int>(qi));
    const fs::path p = dir / name;
    auto out = open_out(p);
    out << "u,intensity,predicted\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
      out << num_full(curve.grid[i]) << ',' << num_full(curve.intensity[i])
          << ',' << (i >= curve.first_predicted ? 1 : 0) << '\n';
    finish(out, p);
    index << name << ',' << num_full(q) << '\n';
  }
  finish(index, index_path);
  return 0;
}

int cmd_summarize(const Common& c) {
  const json sc = c.cfg.value("summarize", json::object());
  const auto sel = selection_from(c.cfg);

  std::vector<std::vector<hs::Segment>> datasets;
  if (sc.contains("datasets")) {
    for (const auto& p : sc.at("datasets"))
      datasets.push_back(
          hs::to_segments(hs::read_dataset(p.get<std::string>()), sel));
  } else if (!c.data.empty()) {
    datasets.push_back(hs::to_segments(hs::read_dataset(c.data), sel));
  } else {
    throw std::invalid_argument(
        "summarize: provide --data or summarize.datasets");
  }
  if (datasets.empty())
    throw std::invalid_argument("summarize: no datasets given");

  const auto thresholds =
      sc.value("thresholds", std::vector<double>{0.5, 1.0, 2.0, 3.0});
  std::vector<hs::Segment> pooled;
  for (const auto& d : datasets) pooled.insert(pooled.end(), d.begin(), d.end());

  const fs::path dir(c.out);
  for (double thr : thresholds) {
    const auto pmf = hs::cluster_pmf(pooled, thr);
    char name[48];
    std::snprintf(name, sizeof name, "cluster_t%g.csv", thr);
    const fs::path p = dir / name;
    auto out = open_out(p);
    out << "size,probability\n";
    for (const auto& [size, prob] : pmf.pmf)
      out << size << ',' << num_full(prob) << '\n';
    finish(out, p);
  }
  write_summary(dir, hs::season_summaries(datasets));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-regime point process toolkit: fitting, simulation, "
               "prediction, and summaries over match-segment event data"};
  app.require_subcommand(1);

  Common c;
  auto add_common = [&c](CLI::App* cmd) {
    cmd->add_option("--config", c.config_path, "JSON config file");
    cmd->add_option("--data", c.data, "segment dataset (.csv or .json)");
    cmd->add_option("--out", c.out, "output directory (default: out)");
    cmd->add_option("--seed", c.seed, "master RNG seed");
    cmd->add_option("--model", c.model, "model variant: a, b, c, or d");
    cmd->add_option("--threads", c.threads, "worker thread count");
    return cmd;
  };
  CLI::App* fit = add_common(
      app.add_subcommand("fit", "fit the model by Monte Carlo EM"));
  CLI::App* simulate = add_common(
      app.add_subcommand("simulate", "simulate replicated seasons"));
  CLI::App* predict = add_common(
      app.add_subcommand("predict", "intensity curves at query times"));
  CLI::App* summarize = add_common(
      app.add_subcommand("summarize", "cluster PMFs and season summaries"));
  CLI::App* se = add_common(
      app.add_subcommand("se", "recompute standard errors for a stored fit"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    resolve_common(cmd, c);
    fs::create_directories(c.out);
    if (cmd == fit) return cmd_fit(c);
    if (cmd == simulate) return cmd_simulate(c);
    if (cmd == predict) return cmd_predict(c);
    if (cmd == summarize) return cmd_summarize(c);
    if (cmd == se) return cmd_se(c);
    return 2;
  } catch (const hs::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 5;
  } catch (const hs::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 5;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
