#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace hotstate::detail {

// Gauss-Legendre rule on [-1,1]; cached per node count.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussLegendre& gauss_legendre(int n);

// Integrate f over [a,b] with an n-node Gauss-Legendre rule.
template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
  if (!(b > a)) return 0.0;
  const GaussLegendre& rule = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    acc += rule.w[i] * f(c + h * rule.x[i]);
  return acc * h;
}

// 7-15 Gauss-Kronrod pair; returns (kronrod estimate, error estimate).
template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  static const double xgk[8] = {
      0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
      0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
      0.2077849550078985, 0.0};
  static const double wgk[8] = {
      0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
      0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
      0.2044329400752989, 0.2094821410847278};
  static const double wg[4] = {0.1294849661688697, 0.2797053914892767,
                               0.3818300505051189, 0.4179591836734694};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wgk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double f1 = f(c - h * xgk[i]);
    const double f2 = f(c + h * xgk[i]);
    kron += wgk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

// Adaptive bisection on top of gk15.  Tolerances are per panel; fine for
// the smooth positive integrands this library feeds it.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                          double abs_tol = 1e-14, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  auto [val, err] = gk15(f, a, b);
  if (err <= std::max(abs_tol, rel_tol * std::abs(val)) || max_depth <= 0)
    return val;
  const double mid = 0.5 * (a + b);
  if (!(mid > a && mid < b)) return val;  // interval at floating-point floor
  return integrate_adaptive(f, a, mid, rel_tol, abs_tol / 2, max_depth - 1) +
         integrate_adaptive(f, mid, b, rel_tol, abs_tol / 2, max_depth - 1);
}

}  // namespace hotstate::detail
