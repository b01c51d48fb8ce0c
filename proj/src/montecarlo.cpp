#include "hyperfit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperfit/error.hpp"

namespace hyperfit {

namespace {

constexpr double kMaxNonConvergedFraction = 0.05;
constexpr double kSkewLimit = 0.5;
constexpr double kKurtosisLimit = 1.0;

struct GenerationOutcome {
  bool ok = false;
  SingularityParams params;
  std::size_t truncated = 0;
};

FitConfig generation_config(const FitConfig& base) {
  FitConfig c = base;
  c.model = ModelKind::singularity;
  c.execution = kernels::Execution::serial;
  return c;
}

GenerationOutcome run_generation(const InflationSeries& rates, const FitConfig& config, const MCConfig& mc,
                                 std::uint64_t j) {
  GenerationOutcome out;
  auto stream = generation_stream(mc.seed, j);
  try {
    const InflationSeries sample = sample_generation(rates, mc.rel_error, stream, &out.truncated);
    const FitResult fit = fit_singularity(build_price_index(sample), config);
    out.ok = fit.converged;
    out.params = std::get<SingularityParams>(fit.params);
  } catch (const InputError&) {
    out.ok = false;
  } catch (const DomainError&) {
    out.ok = false;
  }
  return out;
}

// Moments of `values` taken about `reference`, so identical samples give an
// exact mean and a zero spread.
ParamStats summarize(const std::vector<double>& values, double reference, double threshold) {
  ParamStats s;
  s.direct = reference;
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.std = std::numeric_limits<double>::quiet_NaN();
    s.ratio = std::numeric_limits<double>::infinity();
    return s;
  }
  const double m = static_cast<double>(values.size());
  double shift = 0.0;
  for (double v : values) shift += v - reference;
  shift /= m;
  double var = 0.0;
  for (double v : values) {
    const double d = (v - reference) - shift;
    var += d * d;
  }
  s.mean = reference + shift;
  s.std = std::sqrt(var / m);
  if (s.std > 0.0) {
    s.ratio = std::abs(shift) / s.std;
  } else {
    s.ratio = shift == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  s.accepted = s.ratio < threshold;
  return s;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (values.empty() || bins == 0) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

MCReport aggregate(const std::vector<GenerationOutcome>& outcomes, const SingularityParams& direct,
                   const MCConfig& mc) {
  MCReport rep;
  rep.rel_error = mc.rel_error;
  rep.generations = outcomes.size();
  rep.seed = mc.seed;
  rep.threshold = mc.threshold;
  rep.t0 = direct.t0;

  std::vector<double> tc, alpha, c0, p0, gamma;
  for (const auto& o : outcomes) {
    rep.truncated_draws += o.truncated;
    if (!o.ok) {
      ++rep.non_converged;
      continue;
    }
    tc.push_back(o.params.tc);
    alpha.push_back(o.params.alpha);
    c0.push_back(o.params.c0);
    p0.push_back(o.params.p0);
    gamma.push_back(alpha_to_gamma(o.params.alpha));
  }
  rep.tc = summarize(tc, direct.tc, mc.threshold);
  rep.alpha = summarize(alpha, direct.alpha, mc.threshold);
  rep.c0 = summarize(c0, direct.c0, mc.threshold);
  rep.p0 = summarize(p0, direct.p0, mc.threshold);
  rep.gamma = summarize(gamma, alpha_to_gamma(direct.alpha), mc.threshold);
  rep.accepted = rep.tc.accepted && rep.alpha.accepted && rep.c0.accepted && rep.p0.accepted;
  rep.reliable = static_cast<double>(rep.non_converged) <=
                 kMaxNonConvergedFraction * static_cast<double>(outcomes.size());

  rep.tc_histogram = histogram(tc, mc.histogram_bins);
  const Moments mo = moments(tc);
  rep.tc_skewness = mo.skewness;
  rep.tc_excess_kurtosis = mo.excess_kurtosis;
  rep.tc_gaussian = std::abs(mo.skewness) < kSkewLimit && std::abs(mo.excess_kurtosis) < kKurtosisLimit;
  return rep;
}

SingularityParams direct_fit(const InflationSeries& rates, const FitConfig& fit_config) {
  FitConfig c = fit_config;
  c.model = ModelKind::singularity;
  const FitResult fit = fit_singularity(build_price_index(rates), c);
  if (!fit.converged) throw DomainError("direct fit did not converge; Monte Carlo needs a converged fit");
  return std::get<SingularityParams>(fit.params);
}

MCReport run_mc_impl(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc, bool parallel) {
  if (mc.generations < 1) throw DomainError("Monte Carlo needs at least one generation");
  if (!(mc.rel_error >= 0.0)) throw DomainError("relative error must be non-negative");
  if (!(mc.threshold > 0.0)) throw DomainError("acceptance threshold must be positive");

  const SingularityParams direct = direct_fit(rates, fit_config);
  const FitConfig config = generation_config(fit_config);
  const auto m = static_cast<long>(mc.generations);
  std::vector<GenerationOutcome> outcomes(mc.generations);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long j = 0; j < m; ++j) {
      outcomes[static_cast<std::size_t>(j)] = run_generation(rates, config, mc, static_cast<std::uint64_t>(j));
    }
  } else {
    for (long j = 0; j < m; ++j) {
      outcomes[static_cast<std::size_t>(j)] = run_generation(rates, config, mc, static_cast<std::uint64_t>(j));
    }
  }
  return aggregate(outcomes, direct, mc);
}

}  // namespace

std::mt19937_64 generation_stream(std::uint64_t seed, std::uint64_t generation) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(generation >> 32)};
  return std::mt19937_64(seq);
}

InflationSeries sample_generation(const InflationSeries& rates, double rel_error, std::mt19937_64& stream,
                                  std::size_t* truncated) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> drawn(rates.rates().begin(), rates.rates().end());
  std::size_t redraws = 0;
  for (std::size_t k = 1; k < drawn.size(); ++k) {
    const double mean = drawn[k];
    const double sd = rel_error * std::abs(mean);
    double v = mean + sd * normal(stream);
    while (v <= -1.0) {
      ++redraws;
      v = mean + sd * normal(stream);
    }
    drawn[k] = v;
  }
  if (truncated) *truncated += redraws;
  return InflationSeries(rates.axis(), {rates.epochs().begin(), rates.epochs().end()}, std::move(drawn));
}

MCReport run_mc(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc) {
  return run_mc_impl(rates, fit_config, mc, mc.execution == kernels::Execution::parallel);
}

MCReport run_mc_serial(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc) {
  return run_mc_impl(rates, fit_config, mc, false);
}

std::vector<SweepRow> sweep_error(const InflationSeries& rates, const FitConfig& fit_config, const MCConfig& mc,
                                  const std::vector<double>& rel_errors) {
  std::vector<SweepRow> rows;
  rows.reserve(rel_errors.size());
  for (double di : rel_errors) {
    MCConfig c = mc;
    c.rel_error = di;
    const MCReport rep = run_mc(rates, fit_config, c);
    SweepRow row;
    row.rel_error_percent = 100.0 * di;
    row.tc_span_std_percent = 100.0 * rep.tc.std / (rep.tc.direct - rep.t0);
    row.gamma_std_percent = 100.0 * rep.gamma.std / rep.gamma.direct;
    row.alpha_std = rep.alpha.std;
    row.c0_std = rep.c0.std;
    row.p0_std = rep.p0.std;
    row.accepted = rep.accepted;
    row.reliable = rep.reliable;
    rows.push_back(row);
  }
  return rows;
}

Moments moments(const std::vector<double>& values) {
  Moments mo;
  if (values.empty()) return mo;
  const double m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  mo.mean = sum / m;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mo.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= m;
  m3 /= m;
  m4 /= m;
  mo.std = std::sqrt(m2);
  if (m2 > 0.0) {
    mo.skewness = m3 / std::pow(m2, 1.5);
    mo.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return mo;
}

}  // namespace hyperfit
