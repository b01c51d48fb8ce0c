#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "hyperfit/error.hpp"
#include "hyperfit/models.hpp"

namespace hyperfit {

namespace odeint = boost::numeric::odeint;

GrowthOdeResult integrate_growth_ode(double r0, double gamma, double a1, double t0, double r_stop, double t_max,
                                     double tolerance) {
  if (!(r0 > 0.0) || !(a1 > 0.0)) throw DomainError("growth ODE needs r0 > 0 and a1 > 0");
  if (!(r_stop > r0)) throw DomainError("stop level must exceed r0");

  const auto rhs = [gamma, a1](const double& r, double& drdt, double /*t*/) { drdt = a1 * std::pow(r, gamma); };
  auto stepper = odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<double>());

  const double h0 = 1e-3 / (a1 * std::pow(r0, gamma - 1.0));
  stepper.initialize(r0, t0, h0);

  GrowthOdeResult result;
  while (stepper.current_time() < t_max) {
    const auto [t_lo, t_hi] = stepper.do_step(rhs);
    ++result.steps;
    const double r_hi = stepper.current_state();
    if (!std::isfinite(r_hi) || r_hi >= r_stop) {
      // Locate the crossing on the dense-output interpolant.
      double lo = t_lo;
      double hi = t_hi;
      double r = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, r);
        if (std::isfinite(r) && r < r_stop) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      result.t = hi;
      result.r = r_stop;
      result.reached = true;
      return result;
    }
  }
  result.t = stepper.current_time();
  result.r = stepper.current_state();
  return result;
}

}  // namespace hyperfit
