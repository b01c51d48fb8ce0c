#pragma once

// Reference computations used only by the tests. None of them calls into the
// library, so they stay independent of the code paths they check.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol || std::abs(diff) <= 1e-15 * std::abs(whole)) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares from the raw normal equations.
inline Line normal_equations(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += (long double)x[k] * x[k];
    sxy += (long double)x[k] * y[k];
  }
  const long double det = n * sxx - sx * sx;
  Line l;
  l.slope = static_cast<double>((n * sxy - sx * sy) / det);
  l.intercept = static_cast<double>((sy * sxx - sx * sxy) / det);
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - l.intercept - l.slope * x[k];
    ssr += e * e;
  }
  const double s2 = ssr / static_cast<double>(x.size() - 2);
  l.slope_se = std::sqrt(s2 * static_cast<double>(n / det));
  return l;
}

/// ln of a product of (1 + i_k), summed term by term.
inline double log_sum(const std::vector<double>& rates, std::size_t upto) {
  double s = 0.0;
  for (std::size_t k = 0; k <= upto; ++k) s += std::log1p(rates[k]);
  return s;
}

/// Smallest tau > 0 with p(t + tau) - p(t) = target, by bisection on [0, hi].
inline double solve_increment(const std::function<double(double)>& p, double t, double target, double hi) {
  const double base = p(t);
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p(t + mid) - base < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Plain power-law log price p0 + C0 T / alpha ((T / (tc - t))^alpha - 1).
inline double power_law(double tc, double alpha, double c0, double p0, double t0, double t) {
  const double T = tc - t0;
  return p0 + c0 * T / alpha * (std::pow(T / (tc - t), alpha) - 1.0);
}

inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const Line l = normal_equations(x, y);
  double my = 0.0;
  for (double v : y) my += v;
  my /= static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    ss_tot += (y[k] - my) * (y[k] - my);
    const double e = y[k] - l.intercept - l.slope * x[k];
    ss_res += e * e;
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace oracle
