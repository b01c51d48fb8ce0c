#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperfit/error.hpp"
#include "hyperfit/fitting.hpp"
#include "oracles.hpp"

using namespace hyperfit;

namespace {

std::vector<Epoch> years(int first, std::size_t n) {
  std::vector<Epoch> e;
  for (std::size_t k = 0; k < n; ++k) e.push_back(Epoch{first + static_cast<int>(k)});
  return e;
}

PriceIndexSeries yearly_index(int first, std::size_t n, const std::function<double(double)>& logp) {
  std::vector<double> p;
  for (std::size_t k = 0; k < n; ++k) p.push_back(std::exp(logp(first + static_cast<double>(k))));
  return PriceIndexSeries(TimeAxis::yearly(), years(first, n), p);
}

const SingularityParams kPeru{1991.29, 0.29, 0.18, -0.38, 1969.0};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("fitting") {

TEST_CASE("exact line fits with zero residue") {
  const auto idx = yearly_index(1950, 10, [](double t) { return 0.5 + 0.2 * (t - 1950.0); });
  const auto fit = fit_linear(idx);
  const auto& p = std::get<LinearParams>(fit.params);
  CHECK(p.p0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.c0 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.t0 == 1950.0);
  CHECK(fit.chi < 1e-12);
  CHECK(fit.converged);
  CHECK(fit.n_params == 2);
}

TEST_CASE("noisy line agrees with the normal equations") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> t, y, p;
  for (int k = 0; k < 500; ++k) {
    t.push_back(k);
    y.push_back(0.3 + 0.01 * k + noise(rng));
    p.push_back(std::exp(y.back()));
  }
  const auto fit = fit_linear(PriceIndexSeries(TimeAxis::yearly(), years(1500, 500), p));
  const auto& lp = std::get<LinearParams>(fit.params);
  const auto ref = oracle::normal_equations(t, y);
  CHECK(lp.c0 == doctest::Approx(ref.slope).epsilon(1e-9));
  CHECK(lp.p0 == doctest::Approx(ref.intercept).epsilon(1e-9));
  CHECK(std::abs(lp.c0 - 0.01) < 3.0 * ref.slope_se);
  double ssr = 0.0;
  for (double r : fit.residuals) ssr += r * r;
  CHECK(fit.chi == doctest::Approx(std::sqrt(ssr / 500.0)));
  CHECK(chi_from_residuals(fit.residuals, ChiDivisor::n_minus_k, 2) == doctest::Approx(std::sqrt(ssr / 498.0)));
}

TEST_CASE("linear fit rejects degenerate input") {
  const auto idx = yearly_index(1950, 2, [](double t) { return t - 1950.0; });
  CHECK_THROWS_AS(fit_linear(idx), DomainError);
}

TEST_CASE("noiseless Peru-like series is recovered") {
  const auto idx = yearly_index(1969, 22, [](double t) { return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t); });
  FitConfig cfg;
  const auto fit = fit_singularity(idx, cfg);
  const auto& p = std::get<SingularityParams>(fit.params);
  CHECK(fit.converged);
  CHECK(rel(p.tc - 1969.0, 1991.29 - 1969.0) < 1e-4);
  CHECK(rel(p.alpha, 0.29) < 1e-4);
  CHECK(rel(p.c0, 0.18) < 1e-4);
  CHECK(rel(p.p0, -0.38) < 1e-4);
  CHECK(fit.chi < 1e-8);
  CHECK(p.t0 == 1969.0);
  CHECK(fit.n_params == 4);
}

TEST_CASE("round trip over random parameter draws") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.1, 1.0), uc(0.05, 0.4), uo(0.05, 0.3), up(-1.0, 1.0);
  const int first = 1950;
  const std::size_t n = 25;
  const double span = static_cast<double>(n - 1);
  int failures = 0;
  for (int draw = 0; draw < 50; ++draw) {
    const double tc = first + span * (1.0 + uo(rng));
    const double alpha = ua(rng), c0 = uc(rng), p0 = up(rng);
    const auto idx = yearly_index(first, n, [&](double t) { return oracle::power_law(tc, alpha, c0, p0, first, t); });
    const auto fit = fit_singularity(idx, FitConfig{});
    const auto& p = std::get<SingularityParams>(fit.params);
    const bool ok = fit.converged && rel(p.tc - first, tc - first) < 1e-3 && rel(p.alpha, alpha) < 1e-3 &&
                    rel(p.c0, c0) < 1e-3 && std::abs(p.p0 - p0) < 1e-3 * std::max(1.0, std::abs(p0));
    if (!ok) {
      ++failures;
      MESSAGE("draw " << draw << ": tc " << tc << " alpha " << alpha << " c0 " << c0 << " p0 " << p0 << " -> "
                      << p.tc << " " << p.alpha << " " << p.c0 << " " << p.p0);
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("objective never increases during refinement") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  const auto idx = yearly_index(1969, 22, [&](double t) {
    return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t) + noise(rng);
  });
  const auto fit = fit_singularity(idx, FitConfig{});
  REQUIRE(fit.objective_trace.size() >= 2);
  for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
    CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1]);
  }
  CHECK(fit.objective == doctest::Approx(fit.objective_trace.back()).epsilon(1e-12));
  double ssr = 0.0;
  for (double r : fit.residuals) ssr += r * r;
  CHECK(fit.chi == doctest::Approx(std::sqrt(ssr / 22.0)).epsilon(1e-14));
}

TEST_CASE("scale and time-shift equivariance") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> logp;
  for (int k = 0; k < 22; ++k) logp.push_back(oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, 1969 + k) + noise(rng));
  const auto make = [&](int first, double scale) {
    std::vector<double> p;
    for (double v : logp) p.push_back(scale * std::exp(v));
    return PriceIndexSeries(TimeAxis::yearly(), years(first, logp.size()), p);
  };
  const auto base = fit_singularity(make(1969, 1.0), FitConfig{});
  const auto scaled = fit_singularity(make(1969, 1000.0), FitConfig{});
  const auto shifted = fit_singularity(make(1979, 1.0), FitConfig{});
  const auto& b = std::get<SingularityParams>(base.params);
  const auto& s = std::get<SingularityParams>(scaled.params);
  const auto& h = std::get<SingularityParams>(shifted.params);

  CHECK(std::abs(s.p0 - (b.p0 + std::log(1000.0))) < 1e-8);
  CHECK(std::abs(s.tc - b.tc) < 1e-8);
  CHECK(std::abs(s.alpha - b.alpha) < 1e-8);
  CHECK(std::abs(s.c0 - b.c0) < 1e-8);
  CHECK(std::abs(scaled.chi - base.chi) < 1e-8);

  CHECK(std::abs(h.tc - (b.tc + 10.0)) < 1e-8);
  CHECK(std::abs(h.alpha - b.alpha) < 1e-8);
  CHECK(std::abs(h.c0 - b.c0) < 1e-8);
  CHECK(std::abs(shifted.chi - base.chi) < 1e-8);
}

TEST_CASE("pinning p0 cannot lower the residue") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int rep = 0; rep < 5; ++rep) {
    const auto idx = yearly_index(1969, 22, [&](double t) {
      return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t) + noise(rng);
    });
    FitConfig pinned;
    pinned.fix_p0 = true;
    const auto free_fit = fit_singularity(idx, FitConfig{});
    const auto pin_fit = fit_singularity(idx, pinned);
    CHECK(pin_fit.chi >= free_fit.chi);
    CHECK(std::get<SingularityParams>(pin_fit.params).p0 == idx.log_index()[0]);
    CHECK(pin_fit.n_params == 3);
  }
}

TEST_CASE("search windows and minimum sizes") {
  const auto idx = yearly_index(1969, 22, [](double t) { return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t); });
  FitConfig cfg;
  cfg.tc_lower = 1995.0;
  cfg.tc_upper = 1994.0;
  CHECK_THROWS_AS(fit_singularity(idx, cfg), DomainError);
  FitConfig bad_alpha;
  bad_alpha.alpha_min = 0.5;
  bad_alpha.alpha_max = 0.5;
  CHECK_THROWS_AS(fit_singularity(idx, bad_alpha), DomainError);
  FitConfig small;
  small.window = EpochWindow{Epoch{1985}, Epoch{1989}};
  CHECK_THROWS_AS(fit_singularity(idx, small), DomainError);

  // Bounds are respected even when the truth lies outside them.
  FitConfig narrow;
  narrow.tc_lower = 1992.0;
  narrow.tc_upper = 2000.0;
  const auto fit = fit_singularity(idx, narrow);
  const auto& p = std::get<SingularityParams>(fit.params);
  CHECK(p.tc >= 1992.0 - 1e-9);
  CHECK(p.tc <= 2000.0 + 1e-9);
}

TEST_CASE("default t_c search starts half a period after the data") {
  const auto idx = yearly_index(1969, 22, [](double t) { return oracle::power_law(1990.2, 0.29, 0.18, -0.38, 1969, t); });
  const auto p = std::get<SingularityParams>(fit_singularity(idx, FitConfig{}).params);
  CHECK(p.tc >= 1990.5 - 1e-9);
}

TEST_CASE("iteration cap flags non-convergence but returns a point") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.1);
  const auto idx = yearly_index(1969, 22, [&](double t) {
    return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t) + noise(rng);
  });
  FitConfig cfg;
  cfg.max_iterations = 1;
  const auto fit = fit_singularity(idx, cfg);
  CHECK_FALSE(fit.converged);
  CHECK(std::isfinite(fit.chi));
  CHECK(fit.iterations == 1);
}

TEST_CASE("flat tail draws a warning") {
  const auto idx = yearly_index(1969, 22, [](double t) {
    return t < 1988 ? oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t)
                    : oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, 1988);
  });
  const auto fit = fit_singularity(idx, FitConfig{});
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("window narrows the fitted data") {
  const auto idx = yearly_index(1960, 31, [](double t) {
    return t < 1969 ? -0.38 + 0.18 * (t - 1969) : oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t);
  });
  FitConfig cfg;
  cfg.window = EpochWindow{Epoch{1969}, Epoch{1990}};
  const auto fit = fit_singularity(idx, cfg);
  const auto& p = std::get<SingularityParams>(fit.params);
  CHECK(fit.residuals.size() == 22);
  CHECK(p.t0 == 1969.0);
  CHECK(rel(p.tc - 1969.0, 22.29) < 1e-4);
}

TEST_CASE("double exponential round trip and nesting") {
  const auto idx = yearly_index(1950, 20, [](double t) { return 0.4 + 0.1 / 0.2 * std::expm1(0.2 * (t - 1950)); });
  FitConfig cfg;
  cfg.model = ModelKind::double_exp;
  const auto fit = fit_double_exp(idx, cfg);
  const auto& p = std::get<DoubleExpParams>(fit.params);
  CHECK(fit.converged);
  CHECK(rel(p.c0, 0.1) < 1e-5);
  CHECK(rel(p.b2, 0.2) < 1e-5);
  CHECK(std::abs(p.p0 - 0.4) < 1e-5);
  CHECK(fit.n_params == 3);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.1);
  const auto noisy = yearly_index(1950, 30, [&](double t) { return 0.4 + 0.05 * (t - 1950) + noise(rng); });
  FitConfig pinned;
  pinned.model = ModelKind::double_exp;
  pinned.pin_b2_zero = true;
  const auto de = fit_double_exp(noisy, pinned);
  const auto lin = fit_linear(noisy);
  const auto& dp = std::get<DoubleExpParams>(de.params);
  const auto& lp = std::get<LinearParams>(lin.params);
  CHECK(dp.b2 == 0.0);
  CHECK(dp.c0 == lp.c0);
  CHECK(dp.p0 == lp.p0);
  CHECK(de.chi == lin.chi);
  CHECK(de.residuals == lin.residuals);
}

TEST_CASE("the generating model wins on its own data") {
  const auto idx = yearly_index(1969, 22, [](double t) { return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t); });
  FitConfig de_cfg;
  de_cfg.model = ModelKind::double_exp;
  const auto de = fit(idx, de_cfg);
  const auto sing = fit(idx, FitConfig{});
  CHECK(de.chi >= sing.chi);
  CHECK(de.model == ModelKind::double_exp);
}

TEST_CASE("predictions") {
  const auto idx = yearly_index(1969, 22, [](double t) { return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t); });
  const auto fit = fit_singularity(idx, FitConfig{});
  const auto& p = std::get<SingularityParams>(fit.params);
  CHECK(predict(fit, p.t0) == doctest::Approx(std::exp(p.p0)).epsilon(1e-15));
  CHECK(predict(fit, 1980.3) == std::exp(eval_singularity(p, 1980.3)));
  CHECK_THROWS_AS(predict(fit, p.tc), DomainError);

  FitResult zim;
  zim.params = SingularityParams{2009.50, 0.79, 0.08, 0.10, 1979.0};
  CHECK(predict(zim, 1979.0) == doctest::Approx(std::exp(0.10)).epsilon(1e-15));
}

TEST_CASE("serial and parallel fits are identical") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise(0.0, 0.1);
  const auto idx = yearly_index(1969, 22, [&](double t) {
    return oracle::power_law(1991.29, 0.29, 0.18, -0.38, 1969, t) + noise(rng);
  });
  FitConfig s, p;
  s.execution = kernels::Execution::serial;
  p.execution = kernels::Execution::parallel;
  kernels::set_threads(4);
  const auto a = fit_singularity(idx, s);
  const auto b = fit_singularity(idx, p);
  CHECK(a.params == b.params);
  CHECK(a.residuals == b.residuals);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("names round trip") {
  for (auto m : {ModelKind::linear, ModelKind::double_exp, ModelKind::singularity}) {
    CHECK(parse_model(to_string(m)) == m);
  }
  CHECK(parse_model("doubleexp") == ModelKind::double_exp);
  CHECK(parse_chi_divisor("n-k") == ChiDivisor::n_minus_k);
  CHECK_THROWS_AS(parse_model("cubic"), InputError);
}

}
