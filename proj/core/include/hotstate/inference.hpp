#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hotstate/process_model.hpp"
#include "hotstate/rng.hpp"

namespace hotstate {

// ---- tau posterior ------------------------------------------------------

// Grid inverse-CDF representation of p(tau | segment data, theta), the
// density proportional to exp(cond_loglik(theta, seg, tau)) * gamma pdf.
// Grid knots include every observed gap and E - T_K (where the conditional
// term kinks); cells get exact prior-mass increments weighted by the
// midpoint conditional likelihood, the CDF interpolates linearly inside a
// cell, and the region beyond the last knot (conditional term constant) is
// the exactly truncated gamma.  An eventless segment falls back to exact
// prior draws.
class TauPosterior {
 public:
  TauPosterior(const ModelSpec& spec, const Segment& seg, int grid_cells = 512);

  double cdf(double x) const;
  double mean() const;
  double sample(Rng& rng) const;
  // Inverse CDF; sample() is quantile(u) at one uniform per draw.  Stratified
  // callers feed u = (k + U_k)/m to kill the variance of moment estimates.
  double quantile(double u) const;
  bool prior_exact() const { return prior_exact_; }

 private:
  HotDurationDist prior_;
  bool prior_exact_ = false;
  double tau_const_ = 0.0;
  double tail_mass_ = 0.0;           // posterior mass beyond tau_const_
  std::vector<double> edges_;        // cell boundaries, edges_[0] = 0
  std::vector<double> cum_;          // posterior CDF at edges_
  std::vector<double> pdf_;          // prior density at edges_
  std::vector<double> prior_cdf_;    // prior CDF at edges_

  double cell_offset(std::size_t j, double v) const;
  double cell_cdf(std::size_t j, double x) const;
};

// m i.i.d. draws from the tau posterior of one segment.
std::vector<double> sample_tau_posterior(const ModelSpec& spec,
                                         const Segment& seg, int m, Rng& rng,
                                         int grid_cells = 512);

// ---- MCEM ----------------------------------------------------------------

struct McemConfig {
  int max_iters = 80;
  double tol = 1e-3;     // relative l-inf change, unconstrained scale
  int patience = 3;      // consecutive sub-tol iterations to declare converged
  int m0 = 200;          // Monte Carlo draws at iteration 0
  double m_growth = 1.5; // per-iteration growth factor
  int m_max = 5000;
  int grid_cells = 512;  // tau-posterior grid resolution

  enum class Optimizer { QuasiNewton, Simplex };
  Optimizer optimizer = Optimizer::QuasiNewton;
  double opt_gtol = 1e-8;
  int opt_max_iters = 200;
  double fd_step = 1e-6;  // optimizer gradient step, relative

  std::uint64_t seed = 1;
  int threads = 1;

  bool tau_latent = true;
  double fixed_tau = 0.0;         // conditioning value when !tau_latent
  std::set<std::string> fixed;    // slot names pinned at their init values

  bool compute_se = true;
  int se_samples = 2000;

  int mc_samples(int d) const;    // nondecreasing schedule, capped at m_max
};

struct IterationRecord {
  int iteration = 0;
  int m_samples = 0;
  double q_before = 0.0;  // Q-tilde at the incoming theta, this iteration's draws
  double q_after = 0.0;   // Q-tilde at the maximizer
  double rel_change = 0.0;
  std::vector<double> natural;  // natural-scale free parameters
};

struct FitResult {
  ModelSpec theta_hat;
  std::vector<std::string> names;  // free parameter slots, packed order
  std::vector<double> estimates;   // natural scale, aligned with names
  std::vector<double> se;          // natural scale; empty when unavailable
  bool se_available = false;
  std::string se_message;
  std::vector<IterationRecord> trace;
  bool converged = false;
  std::vector<std::string> warnings;

  // Parameterization echo so standard errors can be recomputed later.
  bool tau_latent = true;
  double fixed_tau = 0.0;
  std::set<std::string> fixed;
};

FitResult mcem_fit(const std::vector<Segment>& segments, const ModelSpec& init,
                   const McemConfig& cfg);

// ---- Louis standard errors ------------------------------------------------

struct LouisResult {
  std::vector<double> se;  // natural scale, aligned with fit.names
  bool available = false;
  std::string message;     // offending eigenvalue when not positive definite
  Eigen::MatrixXd information;  // unconstrained-scale observed information
};

// Observed information E[-d2 l_full] - Var[d l_full] over m tau-posterior
// draws per segment, derivatives by central finite differences on the
// unconstrained scale; SEs mapped back by the delta method.
LouisResult louis_se(const FitResult& fit, const std::vector<Segment>& segments,
                     int m, std::uint64_t seed, int grid_cells = 512,
                     int threads = 1);

// ---- initialization --------------------------------------------------------

// Fills a model skeleton with data-driven starting values: every baseline
// level at the pooled event rate, nu = 0.5, beta = 0, gamma(4, 2); smooth
// baselines start at the pooled rate with a mild early bump.
ModelSpec default_init(const ModelSpec& skeleton,
                       const std::vector<Segment>& segments);

double crude_rate(const std::vector<Segment>& segments);

}  // namespace hotstate
