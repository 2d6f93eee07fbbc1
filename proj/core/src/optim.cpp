#include "hotstate/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace hotstate::detail {

namespace {

Eigen::VectorXd numeric_grad(const Objective& f, const Eigen::VectorXd& x,
                             double rel_step) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  std::vector<double> xp(x.data(), x.data() + n);
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    const double orig = xp[j];
    xp[j] = orig + h;
    const double fp = f(xp);
    xp[j] = orig - h;
    const double fm = f(xp);
    xp[j] = orig;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

OptimResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                          int max_iters, double gtol, double rel_step) {
  const int n = static_cast<int>(x0.size());
  OptimResult res;
  res.x = x0;
  if (n == 0) {
    res.f = f(x0);
    res.converged = true;
    return res;
  }

  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), n);
  auto feval = [&](const Eigen::VectorXd& v) {
    return f(std::vector<double>(v.data(), v.data() + n));
  };

  double fx = feval(x);
  res.f = fx;
  if (!std::isfinite(fx)) return res;

  auto geval = [&](const Eigen::VectorXd& v) {
    return numeric_grad(f, v, rel_step);
  };
  Eigen::VectorXd g = geval(x);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);

  for (int iter = 1; iter <= max_iters; ++iter) {
    res.iterations = iter;
    if (g.cwiseAbs().maxCoeff() < gtol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      H.setIdentity();
      d = -g;
      slope = g.dot(d);
    }

    double t = 1.0;
    double fnew = std::numeric_limits<double>::infinity();
    Eigen::VectorXd xnew;
    bool accepted = false;
    while (t > 1e-14) {
      xnew = x + t * d;
      fnew = feval(xnew);
      if (std::isfinite(fnew) && fnew <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Steepest descent also stalls: treat a tiny gradient as success.
      res.converged = g.cwiseAbs().maxCoeff() < std::sqrt(gtol);
      break;
    }

    const Eigen::VectorXd gnew = geval(xnew);
    const Eigen::VectorXd s = xnew - x;
    const Eigen::VectorXd y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd Hy = H * y;
      H += ((sy + y.dot(Hy)) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }

    const double df = fx - fnew;
    x = xnew;
    g = gnew;
    fx = fnew;
    if (df >= 0.0 && df <= 1e-12 * (1.0 + std::abs(fx)) &&
        s.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + x.cwiseAbs().maxCoeff())) {
      res.converged = true;
      break;
    }
  }

  res.x.assign(x.data(), x.data() + n);
  res.f = fx;
  return res;
}

OptimResult minimize_nelder_mead(const Objective& f, std::vector<double> x0,
                                 int max_iters, double ftol) {
  const int n = static_cast<int>(x0.size());
  OptimResult res;
  res.x = x0;
  if (n == 0) {
    res.f = f(x0);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int j = 0; j < n; ++j)
    pts[j + 1][j] += 0.05 * std::max(1.0, std::abs(x0[j]));
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
  };

  for (int iter = 1; iter <= max_iters; ++iter) {
    res.iterations = iter;
    sort_simplex();
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= ftol * (1.0 + std::abs(fv[best]))) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;
    }
    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (int j = 0; j < n; ++j)
        p[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
      return p;
    };

    const std::vector<double> refl = blend(-1.0);
    const double frefl = f(refl);
    if (frefl < fv[best]) {
      const std::vector<double> exp_p = blend(-2.0);
      const double fexp = f(exp_p);
      if (fexp < frefl) {
        pts[worst] = exp_p;
        fv[worst] = fexp;
      } else {
        pts[worst] = refl;
        fv[worst] = frefl;
      }
    } else if (frefl < fv[second]) {
      pts[worst] = refl;
      fv[worst] = frefl;
    } else {
      const std::vector<double> contr = blend(frefl < fv[worst] ? -0.5 : 0.5);
      const double fcontr = f(contr);
      if (fcontr < std::min(frefl, fv[worst])) {
        pts[worst] = contr;
        fv[worst] = fcontr;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int j = 0; j < n; ++j)
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }

  sort_simplex();
  res.x = pts[order[0]];
  res.f = fv[order[0]];
  return res;
}

}  // namespace hotstate::detail
