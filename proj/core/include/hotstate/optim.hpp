#pragma once

#include <functional>
#include <vector>

namespace hotstate::detail {

struct OptimResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Quasi-Newton minimizer: BFGS inverse-Hessian updates, central-difference
// gradients (rel_step relative to coordinate magnitude), Armijo backtracking.
OptimResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                          int max_iters = 200, double gtol = 1e-8,
                          double rel_step = 1e-6);

// Nelder-Mead simplex, derivative-free alternative.
OptimResult minimize_nelder_mead(const Objective& f, std::vector<double> x0,
                                 int max_iters = 4000, double ftol = 1e-10);

}  // namespace hotstate::detail
