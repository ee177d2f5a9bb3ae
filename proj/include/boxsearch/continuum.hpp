#pragma once

#include <Eigen/Dense>

#include "boxsearch/common.hpp"

namespace boxsearch {

// Scaling-limit description of the specialized searcher on a power-law
// prior: box mass x^-b over (0,1], k agents, activation slope
// sigma = b/(b+k-1), time measured as a fraction of the box count.
struct ContinuumParams {
  double b;
  int k;
  double sigma;

  ContinuumParams(double b_, int k_);

  // Fraction of boxes already reachable at scaled time t.
  double gamma(double t) const;
  // Water level multiplying x^(b/(k-1)) in the limiting survival profile.
  double alpha(double t) const;
};

// Limiting survival profile OPT(x,t), piecewise in (t vs sigma*x, sigma, 1).
double opt_value(const ContinuumParams& p, double x, double t);

// integral over t and x of x^-b OPT(x,t)^k, closed form:
// sigma(2-sigma)/(2-b) + (1-sigma)^2/(k+1).
double u_opt(const ContinuumParams& p);

// Same quantity with the x-integral done analytically per branch and the
// t-integral done by adaptive Gauss-Kronrod; the independent check.
double u_opt_quadrature(const ContinuumParams& p, double rel_tol = 1e-9);

// Limiting ratio of the specialized searcher's time to the coordinated
// baseline: k(2-b) * u_opt.
double pareto_ratio_limit(const ContinuumParams& p);

// prod_{i=a}^{b} i/(i+phi) <= (a/b)^phi for integers b >= a >= 1 and
// phi in (0,1].  Both sides evaluated in log space.
struct GammaCheck {
  double log_lhs;
  double log_rhs;
  bool holds;  // log_lhs <= log_rhs + log1p(1e-12)
};
GammaCheck gamma_product_check(long a, long b, double phi);

// Minimizes sum_x c(x) f(x)^k over f in [0,1]^n subject to
// sum_x (1 - f(x)) <= T.  Returns the water-filling profile
// f(x) = min(1, alpha c(x)^(-1/(k-1))) with the smallest feasible alpha;
// f(x) = 1 wherever c(x) = 0.  Input need not be sorted.
Eigen::ArrayXd discrete_waterfill(const Eigen::ArrayXd& c, double T, int k);

}  // namespace boxsearch
