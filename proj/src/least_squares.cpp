#include "hyperfit/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace hyperfit::detail {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kLambdaInit = 1e-3;
constexpr double kLambdaMax = 1e16;
constexpr double kLambdaMin = 1e-15;

double sum_squares(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

void project(std::vector<double>& theta, std::span<const double> lower, std::span<const double> upper) {
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::clamp(theta[j], lower[j], upper[j]);
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals, std::vector<double> theta,
                             std::span<const double> lower, std::span<const double> upper,
                             const LmOptions& options) {
  const std::size_t n = theta.size();
  project(theta, lower, upper);

  LmResult out;
  std::vector<double> r(n_residuals);
  std::vector<double> jac(n_residuals * n);
  std::vector<double> r_trial(n_residuals);

  if (!fn(theta, r, jac)) {
    out.theta = theta;
    out.residuals = r;
    out.ssr = std::numeric_limits<double>::infinity();
    return out;
  }
  double ssr = sum_squares(r);
  out.ssr_trace.push_back(ssr);
  double lambda = kLambdaInit;

  const auto finish = [&](bool converged) {
    out.theta = theta;
    out.residuals = r;
    out.ssr = ssr;
    out.converged = converged;
    return out;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter + 1;
    if (ssr == 0.0) return finish(true);

    const Eigen::Map<const RowMatrix> J(jac.data(), static_cast<Eigen::Index>(n_residuals),
                                        static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n_residuals));
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;

    // Projected scaled gradient: components pushing into an active bound do not count.
    // Blocked coordinates sit on a bound with the descent direction pointing
    // outward; they are held fixed for this iteration.
    double gnorm = 0.0;
    std::vector<Eigen::Index> free;
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const bool blocked = (theta[j] <= lower[j] && g(jj) > 0.0) || (theta[j] >= upper[j] && g(jj) < 0.0);
      if (blocked) continue;
      free.push_back(jj);
      if (A(jj, jj) == 0.0) continue;
      gnorm = std::max(gnorm, std::abs(g(jj)) / (std::sqrt(A(jj, jj)) * std::sqrt(ssr)));
    }
    if (free.empty() || gnorm <= options.gtol) return finish(true);

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd Af(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = g(free[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nf; ++b) {
        Af(a, b) = A(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
    }
    Eigen::VectorXd scale = Af.diagonal();
    const double floor = std::max(scale.maxCoeff(), 1.0) * 1e-12;
    for (Eigen::Index j = 0; j < scale.size(); ++j) scale(j) = std::max(scale(j), floor);

    while (true) {
      Eigen::MatrixXd M = Af;
      M.diagonal() += lambda * scale;
      const Eigen::VectorXd df = M.ldlt().solve(-gf);
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (Eigen::Index a = 0; a < nf; ++a) delta(free[static_cast<std::size_t>(a)]) = df(a);

      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = theta[j] + delta(static_cast<Eigen::Index>(j));
      project(trial, lower, upper);

      double ssr_trial = std::numeric_limits<double>::infinity();
      if (delta.allFinite() && fn(trial, r_trial, {})) ssr_trial = sum_squares(r_trial);
      if (!(ssr_trial < ssr)) {
        lambda *= 4.0;
        // No descent even for a vanishing step: stationary to working precision.
        if (lambda > kLambdaMax) return finish(true);
        continue;
      }

      double step = 0.0;
      double size = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        step += (trial[j] - theta[j]) * (trial[j] - theta[j]);
        size += theta[j] * theta[j];
      }
      const double rel_decrease = (ssr - ssr_trial) / ssr;
      theta = std::move(trial);
      fn(theta, r, jac);
      ssr = sum_squares(r);
      out.ssr_trace.push_back(ssr);
      lambda = std::max(lambda / 3.0, kLambdaMin);

      if (rel_decrease <= options.ftol || std::sqrt(step) <= options.xtol * (std::sqrt(size) + options.xtol)) {
        return finish(true);
      }
      break;
    }
  }
  return finish(false);
}

}  // namespace hyperfit::detail
