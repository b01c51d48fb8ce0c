#include "hyperfit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "hyperfit/error.hpp"
#include "hyperfit/least_squares.hpp"

namespace hyperfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kC0Floor = 1e-12;

struct Prepared {
  PriceIndexSeries data;
  double t0 = 0.0;
  std::vector<double> tau;
  std::vector<double> y;
};

Prepared prepare(const PriceIndexSeries& index, const std::optional<EpochWindow>& window) {
  Prepared p{window ? slice(index, *window) : index, 0.0, {}, {}};
  const auto t = p.data.times();
  p.t0 = t.front();
  p.tau.reserve(t.size());
  for (double v : t) p.tau.push_back(v - p.t0);
  p.y.assign(p.data.log_index().begin(), p.data.log_index().end());
  return p;
}

std::vector<double> geometric_nodes(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.back() = hi;
  return out;
}

FitResult finish(ModelKind model, ModelParams params, const Prepared& prep, std::size_t n_params,
                 ChiDivisor divisor) {
  FitResult r;
  r.model = model;
  r.params = params;
  r.times.assign(prep.data.times().begin(), prep.data.times().end());
  r.residuals.resize(prep.y.size());
  double ssr = 0.0;
  for (std::size_t k = 0; k < prep.y.size(); ++k) {
    r.residuals[k] = prep.y[k] - eval_model(params, r.times[k]);
    ssr += r.residuals[k] * r.residuals[k];
  }
  r.objective = ssr;
  r.n_params = n_params;
  r.chi_divisor = divisor;
  r.chi = chi_from_residuals(r.residuals, divisor, n_params);
  return r;
}

void warn_if_tail_not_increasing(const Prepared& prep, FitResult& r) {
  const std::size_t n = prep.y.size();
  const std::size_t tail = std::min<std::size_t>(n, 4);
  for (std::size_t k = n - tail + 1; k < n; ++k) {
    if (!(prep.y[k] > prep.y[k - 1])) {
      r.warnings.push_back("price index is not strictly increasing over the last samples");
      return;
    }
  }
}

}  // namespace

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::linear: return "linear";
    case ModelKind::double_exp: return "doubleexp";
    case ModelKind::singularity: return "singularity";
  }
  return "singularity";
}

std::string_view to_string(ChiDivisor d) { return d == ChiDivisor::n ? "n" : "n-k"; }

ModelKind parse_model(std::string_view s) {
  if (s == "linear") return ModelKind::linear;
  if (s == "doubleexp") return ModelKind::double_exp;
  if (s == "singularity") return ModelKind::singularity;
  throw InputError("unknown model '" + std::string(s) + "'");
}

ChiDivisor parse_chi_divisor(std::string_view s) {
  if (s == "n") return ChiDivisor::n;
  if (s == "n-k") return ChiDivisor::n_minus_k;
  throw InputError("unknown chi divisor '" + std::string(s) + "'");
}

double chi_from_residuals(std::span<const double> residuals, ChiDivisor divisor, std::size_t n_params) {
  double ssr = 0.0;
  for (double e : residuals) ssr += e * e;
  const double n = static_cast<double>(residuals.size());
  const double denom = divisor == ChiDivisor::n ? n : n - static_cast<double>(n_params);
  if (!(denom > 0.0)) return kInf;
  return std::sqrt(ssr / denom);
}

double eval_model(const ModelParams& params, double t) {
  return std::visit(
      [t](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearParams>) {
          return eval_linear(p, t);
        } else if constexpr (std::is_same_v<P, DoubleExpParams>) {
          return eval_double_exp(p, t);
        } else {
          return eval_singularity(p, t);
        }
      },
      params);
}

double predict(const FitResult& fit, double t) { return std::exp(eval_model(fit.params, t)); }

FitResult fit_linear(const PriceIndexSeries& index, const std::optional<EpochWindow>& window, ChiDivisor divisor) {
  const Prepared prep = prepare(index, window);
  const std::size_t n = prep.y.size();
  if (n < 3) throw DomainError("linear fit needs at least 3 points, got " + std::to_string(n));
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    tm += prep.tau[k];
    ym += prep.y[k];
  }
  tm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (prep.tau[k] - tm) * (prep.tau[k] - tm);
    sxy += (prep.tau[k] - tm) * (prep.y[k] - ym);
  }
  if (!(sxx > 0.0)) throw DomainError("degenerate time values in linear fit");
  const double c0 = sxy / sxx;
  FitResult r = finish(ModelKind::linear, LinearParams{ym - c0 * tm, c0, prep.t0}, prep, 2, divisor);
  r.converged = true;
  r.objective_trace = {r.objective};
  return r;
}

FitResult fit_double_exp(const PriceIndexSeries& index, const FitConfig& config) {
  if (config.pin_b2_zero) {
    const FitResult lin = fit_linear(index, config.window, config.chi_divisor);
    const auto& lp = std::get<LinearParams>(lin.params);
    FitResult r = lin;
    r.model = ModelKind::double_exp;
    r.params = DoubleExpParams{lp.p0, lp.c0, 0.0, lp.t0};
    return r;
  }

  const Prepared prep = prepare(index, config.window);
  const std::size_t n = prep.y.size();
  const std::size_t k_free = config.fix_p0 ? 2 : 3;
  if (n < 6) throw DomainError("double-exponential fit needs at least 6 points, got " + std::to_string(n));
  const double span = prep.tau.back();
  const double b2_hi = config.b2_max.value_or(20.0 / span);
  if (!(b2_hi > 0.0)) throw DomainError("empty b2 search window");

  kernels::AffineOptions opts;
  if (config.fix_p0) opts.fixed_p0 = prep.y.front();

  std::vector<double> b2s(std::max<std::size_t>(config.grid_b2, 2));
  for (std::size_t i = 0; i < b2s.size(); ++i) {
    b2s[i] = b2_hi * static_cast<double>(i) / static_cast<double>(b2s.size() - 1);
  }
  const auto grid = kernels::double_exp_grid(prep.tau, prep.y, b2s, opts, config.execution);
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].ssr < grid[best].ssr) best = i;
  }
  if (!std::isfinite(grid[best].ssr)) throw DomainError("double-exponential grid found no finite objective");

  const auto fn = [&](std::span<const double> th, std::span<double> res, std::span<double> jac) {
    const double b2 = th[0];
    const double c0 = th[1];
    const double p0 = config.fix_p0 ? prep.y.front() : th[2];
    for (std::size_t k = 0; k < n; ++k) {
      const double tau = prep.tau[k];
      const double x = b2 * tau;
      double h = 0.0;
      double dh = 0.0;
      if (std::abs(x) < 1e-2) {
        h = tau * (1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0))));
        dh = tau * tau * (0.5 + x * (1.0 / 3.0 + x * (1.0 / 8.0 + x * (1.0 / 30.0 + x / 144.0))));
      } else {
        h = std::expm1(x) / b2;
        dh = (tau * std::exp(x) - h) / b2;
      }
      res[k] = prep.y[k] - p0 - c0 * h;
      if (!jac.empty()) {
        jac[k * k_free + 0] = -c0 * dh;
        jac[k * k_free + 1] = -h;
        if (!config.fix_p0) jac[k * k_free + 2] = -1.0;
      }
    }
    return std::all_of(res.begin(), res.end(), [](double v) { return std::isfinite(v); });
  };

  std::vector<double> theta{b2s[best], grid[best].c0};
  std::vector<double> lower{0.0, -kInf};
  std::vector<double> upper{b2_hi, kInf};
  if (!config.fix_p0) {
    theta.push_back(grid[best].p0);
    lower.push_back(-kInf);
    upper.push_back(kInf);
  }
  const detail::LmOptions lm{config.xtol, config.ftol, 1e-10, config.max_iterations};
  const auto sol = detail::levenberg_marquardt(fn, n, theta, lower, upper, lm);

  const double p0 = config.fix_p0 ? prep.y.front() : sol.theta[2];
  FitResult r = finish(ModelKind::double_exp, DoubleExpParams{p0, sol.theta[1], sol.theta[0], prep.t0}, prep,
                       k_free, config.chi_divisor);
  r.converged = sol.converged;
  r.iterations = sol.iterations;
  r.objective_trace = sol.ssr_trace;
  warn_if_tail_not_increasing(prep, r);
  return r;
}

FitResult fit_singularity(const PriceIndexSeries& index, const FitConfig& config) {
  const Prepared prep = prepare(index, config.window);
  const std::size_t n = prep.y.size();
  if (n < 6) throw DomainError("singularity fit needs at least 6 points, got " + std::to_string(n));
  const std::size_t k_free = config.fix_p0 ? 3 : 4;

  const double period = prep.data.axis().period();
  const double tau_last = prep.tau.back();
  const double span_lo = config.tc_lower ? *config.tc_lower - prep.t0 : tau_last + 0.5 * period;
  const double span_hi = config.tc_upper ? *config.tc_upper - prep.t0 : 2.0 * tau_last;
  // Offsets of t_c beyond the last sample; the search runs on their logarithm.
  const double off_lo = span_lo - tau_last;
  const double off_hi = span_hi - tau_last;
  if (!(off_lo > 0.0) || !(off_hi > off_lo)) throw DomainError("empty t_c search window");
  if (!(config.alpha_min > 0.0) || !(config.alpha_max > config.alpha_min)) {
    throw DomainError("empty alpha search window");
  }

  const auto offsets = geometric_nodes(off_lo, off_hi, std::max<std::size_t>(config.grid_tc, 2));
  std::vector<double> spans(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) spans[i] = tau_last + offsets[i];
  const auto alphas = geometric_nodes(config.alpha_min, config.alpha_max, std::max<std::size_t>(config.grid_alpha, 2));

  kernels::AffineOptions opts;
  opts.c0_min = kC0Floor;
  if (config.fix_p0) opts.fixed_p0 = prep.y.front();
  const auto grid = kernels::singularity_grid(prep.tau, prep.y, spans, alphas, opts, config.execution);

  // Grid local minima, best first; equal objectives fall to the smaller t_c.
  const std::size_t na = alphas.size();
  const std::size_t ns = spans.size();
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const double v = grid[i * na + j].ssr;
      if (!std::isfinite(v)) continue;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long ii = static_cast<long>(i) + di;
          const long jj = static_cast<long>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(ns) || jj >= static_cast<long>(na)) continue;
          if (grid[static_cast<std::size_t>(ii) * na + static_cast<std::size_t>(jj)].ssr < v) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) starts.push_back(i * na + j);
    }
  }
  if (starts.empty()) throw DomainError("singularity grid found no finite objective");
  std::stable_sort(starts.begin(), starts.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a].ssr < grid[b].ssr; });
  starts.resize(std::min(starts.size(), std::max<std::size_t>(config.refine_starts, 1)));

  // theta = (ln(T - tau_last), ln alpha, C0[, p0]) with T = t_c - t0.
  const double fixed_p0 = prep.y.front();
  const auto fn = [&](std::span<const double> th, std::span<double> res, std::span<double> jac) {
    const double offset = std::exp(th[0]);
    const double T = tau_last + offset;
    const double alpha = std::exp(th[1]);
    const double c0 = th[2];
    const double p0 = config.fix_p0 ? fixed_p0 : th[3];
    for (std::size_t k = 0; k < n; ++k) {
      const double tau = prep.tau[k];
      const double x = T - tau;
      const double L = -std::log1p(-tau / T);
      const double E = std::expm1(alpha * L);
      const double G = T * E / alpha;
      res[k] = prep.y[k] - p0 - c0 * G;
      if (!jac.empty()) {
        const double dG_dT = E / alpha - (E + 1.0) * tau / x;
        const double dG_dalpha = T * ((E + 1.0) * L * alpha - E) / (alpha * alpha);
        jac[k * k_free + 0] = -c0 * dG_dT * offset;
        jac[k * k_free + 1] = -c0 * dG_dalpha * alpha;
        jac[k * k_free + 2] = -G;
        if (!config.fix_p0) jac[k * k_free + 3] = -1.0;
      }
    }
    return std::all_of(res.begin(), res.end(), [](double v) { return std::isfinite(v); });
  };

  std::vector<double> lower{std::log(off_lo), std::log(config.alpha_min), kC0Floor};
  std::vector<double> upper{std::log(off_hi), std::log(config.alpha_max), kInf};
  if (!config.fix_p0) {
    lower.push_back(-kInf);
    upper.push_back(kInf);
  }
  const detail::LmOptions lm{config.xtol, config.ftol, 1e-10, config.max_iterations};

  std::optional<detail::LmResult> best;
  for (std::size_t s : starts) {
    const std::size_t i = s / na;
    const std::size_t j = s % na;
    std::vector<double> theta{std::log(offsets[i]), std::log(alphas[j]), grid[s].c0};
    if (!config.fix_p0) theta.push_back(grid[s].p0);
    auto sol = detail::levenberg_marquardt(fn, n, std::move(theta), lower, upper, lm);
    if (!best || sol.ssr < best->ssr || (sol.ssr == best->ssr && sol.theta[0] < best->theta[0])) {
      best = std::move(sol);
    }
  }

  const SingularityParams params{prep.t0 + tau_last + std::exp(best->theta[0]), std::exp(best->theta[1]),
                                 best->theta[2], config.fix_p0 ? fixed_p0 : best->theta[3], prep.t0};
  FitResult r = finish(ModelKind::singularity, params, prep, k_free, config.chi_divisor);
  r.converged = best->converged;
  r.iterations = best->iterations;
  r.objective_trace = best->ssr_trace;
  warn_if_tail_not_increasing(prep, r);
  return r;
}

FitResult fit(const PriceIndexSeries& index, const FitConfig& config) {
  switch (config.model) {
    case ModelKind::linear: return fit_linear(index, config.window, config.chi_divisor);
    case ModelKind::double_exp: return fit_double_exp(index, config);
    case ModelKind::singularity: return fit_singularity(index, config);
  }
  throw DomainError("unknown model");
}

}  // namespace hyperfit
