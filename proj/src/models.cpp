#include "hyperfit/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hyperfit/error.hpp"

namespace hyperfit {

namespace {

// Below this |b2 (t - t0)| the double exponential is replaced by its series.
constexpr double kDoubleExpSeriesThreshold = 1e-8;

void require_before_singularity(double tc, double t) {
  if (!(t < tc)) {
    throw DomainError("t = " + std::to_string(t) + " is at/after the singularity t_c = " + std::to_string(tc));
  }
}

}  // namespace

double eval_linear(const LinearParams& params, double t) { return params.p0 + params.c0 * (t - params.t0); }

double eval_double_exp(const DoubleExpParams& params, double t) {
  const double tau = t - params.t0;
  const double x = params.b2 * tau;
  if (std::abs(x) < kDoubleExpSeriesThreshold) {
    return params.p0 + params.c0 * tau * (1.0 + 0.5 * x);
  }
  return params.p0 + params.c0 / params.b2 * std::expm1(x);
}

double eval_singularity(const SingularityParams& params, double t) {
  require_before_singularity(params.tc, t);
  const double span = params.tc - params.t0;
  // ln(span / (tc - t)) without cancellation near t0
  const double log_ratio = -std::log1p(-(t - params.t0) / span);
  return params.p0 + params.c0 * span / params.alpha * std::expm1(params.alpha * log_ratio);
}

double eval_regime_two(const RegimeTwoParams& params, double t) {
  if (t > params.tc) {
    throw DomainError("t = " + std::to_string(t) + " lies beyond t_c = " + std::to_string(params.tc));
  }
  const double span = params.tc - params.t0;
  const double remaining = (params.tc - t) / span;
  return params.p0 + params.c0 * span / params.alpha_prime * (1.0 - std::pow(remaining, params.alpha_prime));
}

double growth_rate_curve(const SingularityParams& params, double dt, double t) {
  require_before_singularity(params.tc, t);
  const double ratio = (params.tc - params.t0) / (params.tc - t);
  return params.c0 * dt * std::pow(ratio, 1.0 + params.alpha);
}

double alpha_to_gamma(double alpha) {
  if (!(alpha > -1.0)) throw DomainError("alpha must exceed -1");
  return (2.0 + alpha) / (1.0 + alpha);
}

double gamma_to_alpha(double gamma) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  return (2.0 - gamma) / (gamma - 1.0);
}

ABCoefficients ab_coefficients(const SingularityParams& params) {
  const double span = params.tc - params.t0;
  return {params.p0 - params.c0 * span / params.alpha,
          params.c0 * std::pow(span, 1.0 + params.alpha) / params.alpha};
}

double doubling_time(const SingularityParams& params, double t) {
  require_before_singularity(params.tc, t);
  const double ratio = (params.tc - t) / (params.tc - params.t0);
  return std::numbers::ln2 / params.c0 * std::pow(ratio, 1.0 + params.alpha);
}

double doubling_time(const PowerLawAB& params, double t) {
  require_before_singularity(params.tc, t);
  return std::numbers::ln2 / (params.alpha * params.b) * std::pow(params.tc - t, 1.0 + params.alpha);
}

double critical_time(double r0, double gamma, double a1, double t0) {
  if (!(r0 > 0.0) || !(gamma > 1.0) || !(a1 > 0.0)) {
    throw DomainError("critical time needs r0 > 0, gamma > 1 and a1 > 0");
  }
  const double dt = 1.0 / (a1 * (gamma - 1.0) * std::pow(r0, gamma - 1.0));
  if (!std::isfinite(dt)) throw DomainError("critical time is not finite");
  return t0 + dt;
}

RecursionTrace simulate_recursion(const RecursionParams& params, std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("recursion needs at least one step");
  if (!(params.r0 > 0.0)) throw DomainError("recursion needs r0 > 0");
  RecursionTrace trace;
  trace.r.reserve(n_steps + 1);
  trace.r.push_back(params.r0);
  trace.r.push_back(params.r0);
  for (std::size_t k = 2; k <= n_steps; ++k) {
    const double prev = trace.r[k - 2];
    const double next = prev + params.a * std::pow(prev, params.gamma);
    if (!std::isfinite(next)) {
      trace.blew_up = true;
      return trace;
    }
    trace.r.push_back(next);
  }
  trace.r.resize(n_steps + 1);
  return trace;
}

}  // namespace hyperfit
