#include "boxsearch/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace boxsearch {

ContinuumParams::ContinuumParams(double b_, int k_) : b(b_), k(k_) {
  if (!(b > 0.0) || b > 1.0) throw std::invalid_argument("continuum exponent b must lie in (0,1]");
  if (k < 2) throw std::invalid_argument("continuum model needs k >= 2");
  sigma = b / (b + k - 1);
}

double ContinuumParams::gamma(double t) const { return std::min(1.0, t / sigma); }

double ContinuumParams::alpha(double t) const {
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  if (t < sigma) return std::pow(sigma / t, b / (k - 1));
  if (t <= 1.0) return (1.0 - t) / (1.0 - sigma);
  return 0.0;
}

double opt_value(const ContinuumParams& p, double x, double t) {
  if (!(x > 0.0) || x > 1.0) throw std::invalid_argument("opt_value: x must lie in (0,1]");
  if (!(t >= 0.0)) throw std::invalid_argument("opt_value: t must be non-negative");
  if (t > 1.0) return 0.0;
  if (t <= p.sigma * x) return 1.0;
  double shape = std::pow(x, p.b / (p.k - 1));
  if (t <= p.sigma) return p.alpha(t) * shape;  // alpha = (sigma/t)^(b/(k-1))
  return (1.0 - t) / (1.0 - p.sigma) * shape;
}

double u_opt(const ContinuumParams& p) {
  double s = p.sigma;
  return s * (2.0 - s) / (2.0 - p.b) + (1.0 - s) * (1.0 - s) / (p.k + 1);
}

namespace {

// integral over x in (0,1] of x^-b for the un-suppressed region, with the
// b = 1 logarithmic branch.
double plain_mass(double lo, double b) {
  if (b == 1.0) return -std::log(lo);
  return (1.0 - std::pow(lo, 1.0 - b)) / (1.0 - b);
}

// inner(t) = integral over x of x^-b OPT(x,t)^k, analytic per branch.
double inner_integral(const ContinuumParams& p, double t) {
  double s = p.sigma;
  double e1 = (p.b + p.k - 1.0) / (p.k - 1.0);  // exponent+1 of the suppressed piece
  if (t <= 0.0) return plain_mass(0.0, p.b);    // OPT == 1 a.e.; finite only for b < 1
  if (t <= s) {
    double g = t / s;  // boxes below g are suppressed, above survive whole
    double suppressed =
        std::pow(s / t, p.k * p.b / (p.k - 1.0)) * std::pow(g, e1) / e1;
    return suppressed + plain_mass(g, p.b);
  }
  if (t <= 1.0) {
    double level = (1.0 - t) / (1.0 - s);
    return ipow(level, p.k) / e1;
  }
  return 0.0;
}

// 15-point Kronrod rule with embedded 7-point Gauss for the error signal.
struct GK15 {
  double value;
  double error;
};

template <typename F>
GK15 gk15(const F& f, double lo, double hi) {
  static const double xk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                               0.741531185599394, 0.586087235467691, 0.405845151377397,
                               0.207784955007898, 0.0};
  static const double wk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                               0.140653259715525, 0.169004726639267, 0.190350578064785,
                               0.204432940075298, 0.209482141084728};
  static const double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                               0.417959183673469};
  double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double fc = f(c);
  double kron = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double fa = f(c - h * xk[i]);
    double fb = f(c + h * xk[i]);
    kron += wk[i] * (fa + fb);
    if (i % 2 == 1) gauss += wg[i / 2] * (fa + fb);
  }
  return {kron * h, std::abs(kron - gauss) * h};
}

template <typename F>
double adaptive_gk(const F& f, double lo, double hi, double tol, int depth = 0) {
  GK15 r = gk15(f, lo, hi);
  if (depth >= 48 || r.error <= tol) return r.value;
  double mid = 0.5 * (lo + hi);
  return adaptive_gk(f, lo, mid, 0.5 * tol, depth + 1) +
         adaptive_gk(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace

double u_opt_quadrature(const ContinuumParams& p, double rel_tol) {
  auto f = [&p](double t) { return inner_integral(p, t); };
  double scale = std::max(1e-3, u_opt(p));
  double tol = 0.5 * rel_tol * scale;
  // t = sigma separates the two analytic regimes of the inner integral.
  return adaptive_gk(f, 0.0, p.sigma, tol) + adaptive_gk(f, p.sigma, 1.0, tol);
}

double pareto_ratio_limit(const ContinuumParams& p) { return p.k * (2.0 - p.b) * u_opt(p); }

GammaCheck gamma_product_check(long a, long b, double phi) {
  if (!(phi > 0.0) || phi > 1.0)
    throw std::invalid_argument("gamma_product_check: phi must lie in (0,1]");
  if (a < 1 || b < a) throw std::invalid_argument("gamma_product_check: need b >= a >= 1");
  KahanSum lhs;
  for (long i = a; i <= b; ++i)
    lhs.add(std::log(static_cast<double>(i)) - std::log(static_cast<double>(i) + phi));
  GammaCheck c;
  c.log_lhs = lhs.value();
  c.log_rhs = phi * (std::log(static_cast<double>(a)) - std::log(static_cast<double>(b)));
  c.holds = c.log_lhs <= c.log_rhs + std::log1p(1e-12);
  return c;
}

Eigen::ArrayXd discrete_waterfill(const Eigen::ArrayXd& c, double T, int k) {
  const int n = static_cast<int>(c.size());
  if (n == 0) throw std::invalid_argument("waterfill: empty cost vector");
  if (k < 2) throw std::invalid_argument("waterfill: needs k >= 2");
  if (!(T >= 0.0)) throw std::invalid_argument("waterfill: budget must be non-negative");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(c(i)) || c(i) < 0.0)
      throw std::invalid_argument("waterfill: costs must be finite and non-negative");

  // Work on the support sorted by cost descending, i.e. weight ascending;
  // ties keep their input order, which keeps the result deterministic.
  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (c(i) > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&c](int i, int j) { return c(i) > c(j); });
  const int ns = static_cast<int>(order.size());

  Eigen::ArrayXd f = Eigen::ArrayXd::Ones(n);
  if (ns == 0) return f;  // nothing costs anything; checking is pointless

  std::vector<double> w(ns + 1, 0.0), prefix(ns + 1, 0.0);
  {
    KahanSum run;
    double expo = -1.0 / (k - 1);
    for (int y = 1; y <= ns; ++y) {
      w[y] = std::pow(c(order[y - 1]), expo);
      run.add(w[y]);
      prefix[y] = run.value();
    }
  }

  if (T >= static_cast<double>(ns)) return (c > 0.0).select(0.0, f);

  // Same prefix scan the schedule builder uses, with a real-valued budget.
  int y = 1;
  while (y <= ns) {
    double S = static_cast<double>(y) - prefix[y] / w[y];
    if (S > T) break;
    ++y;
  }
  int ac = y - 1;
  double alpha = (static_cast<double>(ac) - T) / prefix[ac];
  for (int j = 0; j < ac; ++j) f(order[j]) = std::min(1.0, alpha * w[j + 1]);

  KahanSum spent;
  for (int i = 0; i < n; ++i) spent.add(1.0 - f(i));
  if (spent.value() > T + 1e-9) throw SolveError("waterfill overspent its budget");
  return f;
}

}  // namespace boxsearch
