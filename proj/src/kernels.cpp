#include "hyperfit/kernels.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hyperfit::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AffineFit singularity_node(std::span<const double> tau, std::span<const double> y, double span, double alpha,
                           const AffineOptions& options, std::vector<double>& g) {
  singularity_basis(tau, span, alpha, g);
  return affine_profile(g, y, options);
}

}  // namespace

AffineFit affine_profile(std::span<const double> g, std::span<const double> y, const AffineOptions& options) {
  const std::size_t n = y.size();
  AffineFit fit;
  if (options.fixed_p0) {
    fit.p0 = *options.fixed_p0;
    double sgg = 0.0;
    double sgy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sgg += g[k] * g[k];
      sgy += g[k] * (y[k] - fit.p0);
    }
    if (!(sgg > 0.0) || !std::isfinite(sgg)) return {0.0, fit.p0, kInf};
    fit.c0 = std::max(sgy / sgg, options.c0_min);
  } else {
    double gm = 0.0;
    double ym = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      gm += g[k];
      ym += y[k];
    }
    gm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sgg = 0.0;
    double sgy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sgg += (g[k] - gm) * (g[k] - gm);
      sgy += (g[k] - gm) * (y[k] - ym);
    }
    if (!(sgg > 0.0) || !std::isfinite(sgg)) return {0.0, ym, kInf};
    fit.c0 = std::max(sgy / sgg, options.c0_min);
    fit.p0 = ym - fit.c0 * gm;
  }
  double ssr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = y[k] - fit.p0 - fit.c0 * g[k];
    ssr += e * e;
  }
  fit.ssr = std::isfinite(ssr) ? ssr : kInf;
  return fit;
}

void singularity_basis(std::span<const double> tau, double span, double alpha, std::span<double> g) {
  const double scale = span / alpha;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double log_ratio = -std::log1p(-tau[k] / span);
    g[k] = scale * std::expm1(alpha * log_ratio);
  }
}

void double_exp_basis(std::span<const double> tau, double b2, std::span<double> g) {
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double x = b2 * tau[k];
    g[k] = std::abs(x) < 1e-8 ? tau[k] * (1.0 + 0.5 * x) : std::expm1(x) / b2;
  }
}

std::vector<AffineFit> singularity_grid_serial(std::span<const double> tau, std::span<const double> y,
                                               std::span<const double> spans, std::span<const double> alphas,
                                               const AffineOptions& options) {
  std::vector<AffineFit> out(spans.size() * alphas.size());
  std::vector<double> g(tau.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      out[i * alphas.size() + j] = singularity_node(tau, y, spans[i], alphas[j], options, g);
    }
  }
  return out;
}

std::vector<AffineFit> singularity_grid_parallel(std::span<const double> tau, std::span<const double> y,
                                                 std::span<const double> spans, std::span<const double> alphas,
                                                 const AffineOptions& options) {
  const auto total = static_cast<long>(spans.size() * alphas.size());
  std::vector<AffineFit> out(static_cast<std::size_t>(total));
#pragma omp parallel
  {
    std::vector<double> g(tau.size());
#pragma omp for schedule(static)
    for (long node = 0; node < total; ++node) {
      const auto i = static_cast<std::size_t>(node) / alphas.size();
      const auto j = static_cast<std::size_t>(node) % alphas.size();
      out[static_cast<std::size_t>(node)] = singularity_node(tau, y, spans[i], alphas[j], options, g);
    }
  }
  return out;
}

std::vector<AffineFit> singularity_grid(std::span<const double> tau, std::span<const double> y,
                                        std::span<const double> spans, std::span<const double> alphas,
                                        const AffineOptions& options, Execution exec) {
  return exec == Execution::parallel ? singularity_grid_parallel(tau, y, spans, alphas, options)
                                     : singularity_grid_serial(tau, y, spans, alphas, options);
}

std::vector<AffineFit> double_exp_grid(std::span<const double> tau, std::span<const double> y,
                                       std::span<const double> b2s, const AffineOptions& options, Execution exec) {
  const auto total = static_cast<long>(b2s.size());
  std::vector<AffineFit> out(b2s.size());
#pragma omp parallel if (exec == Execution::parallel)
  {
    std::vector<double> g(tau.size());
#pragma omp for schedule(static)
    for (long i = 0; i < total; ++i) {
      double_exp_basis(tau, b2s[static_cast<std::size_t>(i)], g);
      out[static_cast<std::size_t>(i)] = affine_profile(g, y, options);
    }
  }
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n >= 1) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace hyperfit::kernels
