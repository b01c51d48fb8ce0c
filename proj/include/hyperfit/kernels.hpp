#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace hyperfit::kernels {

/// Whether a data-parallel kernel runs on the OpenMP team or on the calling
/// thread. Both paths compute each element identically, so their outputs
/// match bit for bit.
enum class Execution { serial, parallel };

/// Best (C0, p0) for y ~ p0 + C0 g and the resulting sum of squares.
struct AffineFit {
  double c0 = 0.0;
  double p0 = 0.0;
  double ssr = 0.0;
};

struct AffineOptions {
  /// Lower bound on C0 (use -infinity for none).
  double c0_min = -std::numeric_limits<double>::infinity();
  /// When set, p0 is held at this value and only C0 is solved for.
  std::optional<double> fixed_p0;
};

/// Closed-form least squares for the two affine parameters given basis g.
AffineFit affine_profile(std::span<const double> g, std::span<const double> y, const AffineOptions& options);

/// Singularity basis g_k = (T / alpha) ((T / (T - tau_k))^alpha - 1) where
/// T = t_c - t0 and tau_k = t_k - t0.
void singularity_basis(std::span<const double> tau, double span, double alpha, std::span<double> g);

/// Double-exponential basis g_k = (exp(b2 tau_k) - 1) / b2.
void double_exp_basis(std::span<const double> tau, double b2, std::span<double> g);

/// Profiled objective at every (span, alpha) node, row-major with span as
/// the slow index.
std::vector<AffineFit> singularity_grid(std::span<const double> tau, std::span<const double> y,
                                        std::span<const double> spans, std::span<const double> alphas,
                                        const AffineOptions& options, Execution exec);

std::vector<AffineFit> singularity_grid_serial(std::span<const double> tau, std::span<const double> y,
                                               std::span<const double> spans, std::span<const double> alphas,
                                               const AffineOptions& options);

std::vector<AffineFit> singularity_grid_parallel(std::span<const double> tau, std::span<const double> y,
                                                 std::span<const double> spans, std::span<const double> alphas,
                                                 const AffineOptions& options);

/// Profiled double-exponential objective at every b2 node.
std::vector<AffineFit> double_exp_grid(std::span<const double> tau, std::span<const double> y,
                                       std::span<const double> b2s, const AffineOptions& options, Execution exec);

/// Worker count the parallel kernels will use.
int max_threads();
/// Sets the OpenMP team size; values < 1 leave the runtime default.
void set_threads(int n);

}  // namespace hyperfit::kernels
