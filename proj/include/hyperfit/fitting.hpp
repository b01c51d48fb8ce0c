#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperfit/kernels.hpp"
#include "hyperfit/models.hpp"
#include "hyperfit/series.hpp"

namespace hyperfit {

enum class ModelKind { linear, double_exp, singularity };

/// Divisor inside the RMS residue: N, or N minus the number of free parameters.
enum class ChiDivisor { n, n_minus_k };

std::string_view to_string(ModelKind m);
std::string_view to_string(ChiDivisor d);
ModelKind parse_model(std::string_view s);
ChiDivisor parse_chi_divisor(std::string_view s);

struct FitConfig {
  ModelKind model = ModelKind::singularity;
  std::optional<EpochWindow> window;

  /// t_c search window in axis time. Defaults: last epoch + period/2 and
  /// last epoch + the span of the data.
  std::optional<double> tc_lower;
  std::optional<double> tc_upper;
  double alpha_min = 0.01;
  double alpha_max = 5.0;
  std::size_t grid_tc = 40;
  std::size_t grid_alpha = 40;
  /// Number of grid minima refined locally; the best refinement wins.
  std::size_t refine_starts = 3;

  /// Upper bound for b2 (1/time). Defaults to 20 / span of the data.
  std::optional<double> b2_max;
  std::size_t grid_b2 = 64;
  bool pin_b2_zero = false;

  /// Hold p0 at ln P(t0) instead of fitting it.
  bool fix_p0 = false;

  double xtol = 1e-9;
  double ftol = 1e-12;
  int max_iterations = 500;
  ChiDivisor chi_divisor = ChiDivisor::n;
  kernels::Execution execution = kernels::Execution::parallel;
};

using ModelParams = std::variant<LinearParams, DoubleExpParams, SingularityParams>;

struct FitResult {
  ModelKind model = ModelKind::linear;
  ModelParams params;
  /// sqrt(SSR / divisor) of the log-price residuals.
  double chi = 0.0;
  /// p_data - p_model at each fitted sample.
  std::vector<double> residuals;
  std::vector<double> times;
  bool converged = false;
  int iterations = 0;
  /// Sum of squared residuals.
  double objective = 0.0;
  /// Objective after each accepted refinement step of the winning start.
  std::vector<double> objective_trace;
  ChiDivisor chi_divisor = ChiDivisor::n;
  std::size_t n_params = 0;
  std::vector<std::string> warnings;
};

double chi_from_residuals(std::span<const double> residuals, ChiDivisor divisor, std::size_t n_params);

/// Ordinary least squares on (t, p); the window narrows the data first.
FitResult fit_linear(const PriceIndexSeries& index, const std::optional<EpochWindow>& window = std::nullopt,
                     ChiDivisor divisor = ChiDivisor::n);
FitResult fit_double_exp(const PriceIndexSeries& index, const FitConfig& config);
/// Four-parameter fit of the finite-time singularity: coarse (t_c, alpha)
/// grid with C0 and p0 profiled out by linear least squares, then bounded
/// Levenberg-Marquardt refinement from the best grid minima.
FitResult fit_singularity(const PriceIndexSeries& index, const FitConfig& config);
/// Dispatches on config.model.
FitResult fit(const PriceIndexSeries& index, const FitConfig& config);

double eval_model(const ModelParams& params, double t);
/// P = exp(p_model(t)). Throws DomainError at/after t_c.
double predict(const FitResult& fit, double t);

}  // namespace hyperfit
