#pragma once

#include <cstddef>
#include <vector>

namespace hyperfit {

// All evaluations work in natural-log price p = ln P. Times are in the units
// of the series time axis (years, or days on monthly data); C0 is the growth
// of p per unit of that axis.

/// Cagan steady state: p(t) = p0 + C0 (t - t0).
struct LinearParams {
  double p0 = 0.0;
  double c0 = 0.0;
  double t0 = 0.0;
  friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

/// Double exponential: p(t) = p0 + (C0 / b2) (exp(b2 (t - t0)) - 1), b2 >= 0.
struct DoubleExpParams {
  double p0 = 0.0;
  double c0 = 0.0;
  double b2 = 0.0;
  double t0 = 0.0;
  friend bool operator==(const DoubleExpParams&, const DoubleExpParams&) = default;
};

/// Power-law feedback with a finite-time singularity of ln P at t_c (alpha > 0).
struct SingularityParams {
  double tc = 0.0;
  double alpha = 0.0;
  double c0 = 0.0;
  double p0 = 0.0;
  double t0 = 0.0;
  friend bool operator==(const SingularityParams&, const SingularityParams&) = default;
};

/// gamma > 2 branch: r(t) diverges but ln P saturates at p0 + C0 (t_c - t0) / alpha'.
struct RegimeTwoParams {
  double tc = 0.0;
  double alpha_prime = 0.0;
  double c0 = 0.0;
  double p0 = 0.0;
  double t0 = 0.0;
};

/// Discrete feedback map r(t + dt) = r(t - dt) + a r(t - dt)^gamma.
struct RecursionParams {
  double r0 = 0.0;
  double a = 0.0;
  double gamma = 1.0;
  double dt = 1.0;

  /// Coefficient of the continuum limit dr/dt = a1 r^gamma.
  [[nodiscard]] double a1() const { return a / (2.0 * dt); }
};

/// p = A + B (t_c - t)^(-alpha).
struct ABCoefficients {
  double a = 0.0;
  double b = 0.0;
};

/// The (alpha, B, t_c) parameterisation, enough for the doubling time.
struct PowerLawAB {
  double alpha = 0.0;
  double b = 0.0;
  double tc = 0.0;
};

double eval_linear(const LinearParams& params, double t);
double eval_double_exp(const DoubleExpParams& params, double t);
/// Throws DomainError for t >= t_c.
double eval_singularity(const SingularityParams& params, double t);
/// Defined up to and including t_c.
double eval_regime_two(const RegimeTwoParams& params, double t);

/// r(t) = C0 dt ((t_c - t0) / (t_c - t))^(1 + alpha), the growth over one period dt.
double growth_rate_curve(const SingularityParams& params, double dt, double t);

double alpha_to_gamma(double alpha);
double gamma_to_alpha(double gamma);

ABCoefficients ab_coefficients(const SingularityParams& params);

/// tau_2(t) = ln2 / C0 ((t_c - t) / (t_c - t0))^(1 + alpha).
double doubling_time(const SingularityParams& params, double t);
/// tau_2(t) = ln2 / (alpha B) (t_c - t)^(1 + alpha).
double doubling_time(const PowerLawAB& params, double t);

/// Blow-up time of dr/dt = a1 r^gamma started from r0 at t0.
double critical_time(double r0, double gamma, double a1, double t0);

struct RecursionTrace {
  std::vector<double> r;
  /// True when the map overflowed before `n_steps` were produced.
  bool blew_up = false;
};

/// Iterates the two interleaved subsequences (even and odd steps), both
/// seeded with r0. Returns r_0 .. r_n, or a shorter trace ending at overflow.
RecursionTrace simulate_recursion(const RecursionParams& params, std::size_t n_steps);

struct GrowthOdeResult {
  double t = 0.0;      ///< time at which r first reached the stop level
  double r = 0.0;
  std::size_t steps = 0;
  bool reached = false;
};

/// Adaptive Dormand-Prince integration of dr/dt = a1 r^gamma from (t0, r0)
/// until r reaches `r_stop` or `t_max` passes.
GrowthOdeResult integrate_growth_ode(double r0, double gamma, double a1, double t0, double r_stop,
                                     double t_max, double tolerance = 1e-12);

}  // namespace hyperfit
