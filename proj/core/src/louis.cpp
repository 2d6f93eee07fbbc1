#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hotstate/collapsed.hpp"
#include "hotstate/inference.hpp"
#include "hotstate/likelihood.hpp"
#include "hotstate/parallel.hpp"
#include "hotstate/param_pack.hpp"

namespace hotstate {

namespace {

// FD point layout: 0 = center, 1+2j / 2+2j = x +/- h_j e_j, then for each
// pair j < k four points (+,+), (+,-), (-,+), (-,-).
struct FdPoints {
  std::vector<std::vector<double>> pts;
  std::vector<double> h;
  std::vector<std::vector<int>> pair_base;
  int grad_count = 0;  // points needed for gradients alone

  explicit FdPoints(const std::vector<double>& x) {
    const int p = static_cast<int>(x.size());
    h.resize(p);
    for (int j = 0; j < p; ++j) h[j] = 1e-5 * std::max(1.0, std::abs(x[j]));
    pts.push_back(x);
    for (int j = 0; j < p; ++j) {
      auto up = x, dn = x;
      up[j] += h[j];
      dn[j] -= h[j];
      pts.push_back(up);
      pts.push_back(dn);
    }
    grad_count = 1 + 2 * p;
    pair_base.assign(p, std::vector<int>(p, -1));
    for (int j = 0; j < p; ++j) {
      for (int k = j + 1; k < p; ++k) {
        pair_base[j][k] = static_cast<int>(pts.size());
        for (int sj : {+1, -1}) {
          for (int sk : {+1, -1}) {
            auto q = x;
            q[j] += sj * h[j];
            q[k] += sk * h[k];
            pts.push_back(q);
          }
        }
      }
    }
  }

  Eigen::VectorXd gradient(const std::vector<double>& f) const {
    const int p = static_cast<int>(h.size());
    Eigen::VectorXd g(p);
    for (int j = 0; j < p; ++j)
      g[j] = (f[1 + 2 * j] - f[2 + 2 * j]) / (2.0 * h[j]);
    return g;
  }

  Eigen::MatrixXd hessian(const std::vector<double>& f) const {
    const int p = static_cast<int>(h.size());
    Eigen::MatrixXd H(p, p);
    for (int j = 0; j < p; ++j)
      H(j, j) = (f[1 + 2 * j] - 2.0 * f[0] + f[2 + 2 * j]) / (h[j] * h[j]);
    for (int j = 0; j < p; ++j) {
      for (int k = j + 1; k < p; ++k) {
        const int b = pair_base[j][k];
        H(j, k) = H(k, j) =
            (f[b] - f[b + 1] - f[b + 2] + f[b + 3]) / (4.0 * h[j] * h[k]);
      }
    }
    return H;
  }
};

}  // namespace

LouisResult louis_se(const FitResult& fit, const std::vector<Segment>& segments,
                     int m, std::uint64_t seed, int grid_cells, int threads) {
  if (!fit.converged)
    throw std::invalid_argument("louis_se: fit must have converged");
  if (m < 500) throw std::invalid_argument("louis_se: m must be >= 500");

  detail::ParamPacker packer(fit.theta_hat, fit.tau_latent, fit.fixed);
  const int p = static_cast<int>(packer.dim());
  LouisResult lr;
  if (p == 0) {
    lr.message = "no free parameters";
    return lr;
  }

  const std::vector<double> xhat = packer.pack(fit.theta_hat);
  const FdPoints fd(xhat);
  const int npts = static_cast<int>(fd.pts.size());

  const bool fast = detail::collapsible(fit.theta_hat);
  const bool latent = fit.tau_latent;

  std::vector<ModelSpec> specs;
  specs.reserve(npts);
  for (int t = 0; t < npts; ++t) specs.push_back(packer.unpack(fd.pts[t]));

  std::vector<detail::CollapsedModel> models;
  std::vector<detail::Evaluator> evals;
  double t_max = 0.0;
  for (const auto& seg : segments) t_max = std::max(t_max, seg.duration);
  if (fast) {
    models.reserve(npts);
    for (int t = 0; t < npts; ++t) models.emplace_back(specs[t]);
  } else {
    evals.reserve(npts);
    for (int t = 0; t < npts; ++t) evals.emplace_back(specs[t], t_max);
  }

  const std::size_t n = segments.size();
  std::vector<Eigen::MatrixXd> neg_h(n), var_g(n);

  detail::parallel_for(n, threads, [&](std::size_t i) {
    const Segment& seg = segments[i];
    Eigen::VectorXd sum_g = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd sum_gg = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd mean_h = Eigen::MatrixXd::Zero(p, p);
    std::vector<double> f(npts);

    if (fast) {
      const detail::CollapsedSegment cs(fit.theta_hat, seg);
      detail::SegTauStats one, mean;
      mean.resize(cs.reg_pieces(), cs.hot_pieces());

      auto eval_at = [&](const detail::SegTauStats& s, int count) {
        for (int t = 0; t < count; ++t) {
          f[t] = models[t].cond(seg.covariates, s);
          if (latent) f[t] += models[t].tau_term(s);
        }
      };

      if (latent) {
        // Stratified posterior draws: Var[g] enters the information as a
        // near-cancelling difference of two large terms, and iid draws leave
        // chi-square noise there that can push small eigenvalues negative.
        // One jittered draw per quantile stratum keeps every draw exactly
        // posterior-distributed while making the moment estimates tight.
        Rng rng = Rng::substream(seed, 0x10c5, i);
        const TauPosterior post(fit.theta_hat, seg, grid_cells);
        const double w = 1.0 / m;
        for (int s = 0; s < m; ++s) {
          cs.stats(post.quantile((s + rng.uniform()) / m), one);
          mean.add_scaled(one, w);
          eval_at(one, fd.grad_count);
          const Eigen::VectorXd g = fd.gradient(f);
          sum_g += g;
          sum_gg += g * g.transpose();
        }
        // The complete-data log-likelihood is linear in the statistics, so
        // the posterior-mean Hessian equals the Hessian at the mean stats.
        eval_at(mean, npts);
        mean_h = fd.hessian(f);
        var_g[i] = (sum_gg - sum_g * sum_g.transpose() / m) / (m - 1.0);
      } else {
        cs.stats(fit.fixed_tau, one);
        eval_at(one, npts);
        mean_h = fd.hessian(f);
        var_g[i] = Eigen::MatrixXd::Zero(p, p);
      }
    } else {
      auto eval_at = [&](double tau, int count) {
        for (int t = 0; t < count; ++t) {
          f[t] = evals[t].cond_loglik(seg, tau);
          if (latent) f[t] += specs[t].tau_dist.log_pdf(tau);
        }
      };

      if (latent) {
        Rng rng = Rng::substream(seed, 0x10c5, i);
        const TauPosterior post(fit.theta_hat, seg, grid_cells);
        for (int s = 0; s < m; ++s) {
          const double tau = post.quantile((s + rng.uniform()) / m);
          eval_at(tau, npts);
          const Eigen::VectorXd g = fd.gradient(f);
          sum_g += g;
          sum_gg += g * g.transpose();
          mean_h += fd.hessian(f) / m;
        }
        var_g[i] = (sum_gg - sum_g * sum_g.transpose() / m) / (m - 1.0);
      } else {
        eval_at(fit.fixed_tau, npts);
        mean_h = fd.hessian(f);
        var_g[i] = Eigen::MatrixXd::Zero(p, p);
      }
    }
    neg_h[i] = -mean_h;
  });

  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < n; ++i) info += neg_h[i] - var_g[i];
  info = 0.5 * (info + info.transpose()).eval();
  lr.information = info;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig > 0.0)) {
    std::ostringstream os;
    os << "observed information not positive definite; smallest eigenvalue "
       << min_eig;
    lr.message = os.str();
    return lr;
  }

  const Eigen::MatrixXd cov = es.eigenvectors() *
                              es.eigenvalues().cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose();
  const std::vector<double> scale = packer.natural_scale(xhat);
  lr.se.resize(p);
  for (int j = 0; j < p; ++j) lr.se[j] = scale[j] * std::sqrt(cov(j, j));
  lr.available = true;
  return lr;
}

}  // namespace hotstate
