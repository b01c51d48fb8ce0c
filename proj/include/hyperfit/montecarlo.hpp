#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hyperfit/fitting.hpp"
#include "hyperfit/series.hpp"

namespace hyperfit {

struct MCConfig {
  /// Relative error assigned to every measured rate.
  double rel_error = 0.25;
  std::size_t generations = 4000;
  std::uint64_t seed = 1;
  /// A run is accepted when every |mean - direct| / std is below this.
  double threshold = 0.1;
  std::size_t histogram_bins = 30;
  kernels::Execution execution = kernels::Execution::parallel;
};

struct ParamStats {
  double direct = 0.0;
  double mean = 0.0;
  double std = 0.0;
  /// |mean - direct| / std (zero when both the spread and the offset vanish).
  double ratio = 0.0;
  bool accepted = false;
  friend bool operator==(const ParamStats&, const ParamStats&) = default;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct MCReport {
  double rel_error = 0.0;
  std::size_t generations = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;

  ParamStats tc;
  ParamStats alpha;
  ParamStats c0;
  ParamStats p0;
  /// gamma = (2 + alpha) / (1 + alpha) per generation.
  ParamStats gamma;
  /// Start of the fitted window, so relative spreads of t_c - t0 can be formed.
  double t0 = 0.0;

  bool accepted = false;
  std::size_t non_converged = 0;
  std::size_t truncated_draws = 0;
  /// False when more than 5% of the generations failed to converge.
  bool reliable = true;

  Histogram tc_histogram;
  double tc_skewness = 0.0;
  double tc_excess_kurtosis = 0.0;
  /// |skewness| < 0.5 and |excess kurtosis| < 1.
  bool tc_gaussian = false;

  friend bool operator==(const MCReport&, const MCReport&) = default;
};

/// Random stream for generation `generation` of a run seeded with `seed`.
/// Depends on nothing else, so results do not depend on scheduling.
std::mt19937_64 generation_stream(std::uint64_t seed, std::uint64_t generation);

/// Draws i_k ~ Normal(i(t_k), rel_error |i(t_k)|) for k >= 1, redrawing any
/// value <= -1. The number of redraws is added to `truncated` when given.
InflationSeries sample_generation(const InflationSeries& rates, double rel_error, std::mt19937_64& stream,
                                  std::size_t* truncated = nullptr);

/// Fits the direct series, then refits `generations` resampled series and
/// aggregates. Generations run on the OpenMP team when
/// mc.execution == parallel; each refit is itself serial.
MCReport run_mc(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc);

/// Reference driver: the same computation on the calling thread only.
MCReport run_mc_serial(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc);

struct SweepRow {
  double rel_error_percent = 0.0;
  /// 100 std(t_c) / (t_c - t0) of the direct fit.
  double tc_span_std_percent = 0.0;
  /// 100 std(gamma) / gamma of the direct fit.
  double gamma_std_percent = 0.0;
  double alpha_std = 0.0;
  double c0_std = 0.0;
  double p0_std = 0.0;
  bool accepted = false;
  bool reliable = true;
};

/// One run_mc per relative error, all with the same seed.
std::vector<SweepRow> sweep_error(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc,
                                  const std::vector<double>& rel_errors);

struct Moments {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Population moments (1/m normalisation) summed in index order.
Moments moments(const std::vector<double>& values);

}  // namespace hyperfit
