#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hyperfit::detail {

/// Residuals r(theta) and, when `jacobian` is non-null, dr/dtheta stored
/// row-major (n_residuals x n_params). Returns false if theta is unusable.
using ResidualFn = std::function<bool(std::span<const double> theta, std::span<double> residuals,
                                      std::span<double> jacobian)>;

struct LmOptions {
  double xtol = 1e-9;
  double ftol = 1e-12;
  double gtol = 1e-10;
  int max_iterations = 500;
};

struct LmResult {
  std::vector<double> theta;
  std::vector<double> residuals;
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Sum of squared residuals after every accepted step, starting point first.
  std::vector<double> ssr_trace;
};

/// Box-constrained Levenberg-Marquardt with Marquardt diagonal scaling.
/// Trial points are projected onto [lower, upper] and only accepted when the
/// sum of squares drops, so the objective is monotone.
LmResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals, std::vector<double> theta,
                             std::span<const double> lower, std::span<const double> upper,
                             const LmOptions& options);

}  // namespace hyperfit::detail
