#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperfit/error.hpp"
#include "hyperfit/montecarlo.hpp"
#include "oracles.hpp"

using namespace hyperfit;

namespace {

std::vector<Epoch> years(int first, std::size_t n) {
  std::vector<Epoch> e;
  for (std::size_t k = 0; k < n; ++k) e.push_back(Epoch{first + static_cast<int>(k)});
  return e;
}

std::vector<Epoch> months(int year, unsigned month, std::size_t n) {
  std::vector<Epoch> e;
  for (std::size_t k = 0; k < n; ++k) {
    const unsigned m = month - 1 + static_cast<unsigned>(k);
    e.push_back(Epoch{year + static_cast<int>(m / 12), m % 12 + 1});
  }
  return e;
}

// Rates whose index follows the power law exactly at the sample times.
InflationSeries power_law_rates(const TimeAxis& axis, const std::vector<Epoch>& epochs, double tc, double alpha,
                                double c0) {
  std::vector<double> rates{0.0};
  const double t0 = axis.to_time(epochs.front());
  for (std::size_t k = 1; k < epochs.size(); ++k) {
    const double a = oracle::power_law(tc, alpha, c0, 0.0, t0, axis.to_time(epochs[k - 1]));
    const double b = oracle::power_law(tc, alpha, c0, 0.0, t0, axis.to_time(epochs[k]));
    rates.push_back(std::expm1(b - a));
  }
  return InflationSeries(axis, epochs, rates);
}

InflationSeries peru() { return power_law_rates(TimeAxis::yearly(), years(1969, 22), 1991.29, 0.29, 0.18); }

InflationSeries germany() {
  const auto axis = TimeAxis::monthly_from(Epoch{1921, 5}, DayConvention::mid);
  const double tc = axis.to_time(Epoch{1924, 1, 5});
  return power_law_rates(axis, months(1921, 5, 31), tc, 0.56, 0.103 / axis.period());
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("zero relative error reproduces the input") {
  const auto rates = peru();
  auto stream = generation_stream(1, 0);
  std::size_t truncated = 0;
  const auto same = sample_generation(rates, 0.0, stream, &truncated);
  CHECK(std::equal(same.rates().begin(), same.rates().end(), rates.rates().begin()));
  CHECK(truncated == 0);
}

TEST_CASE("zero rates stay zero and the first rate is untouched") {
  const InflationSeries rates(TimeAxis::yearly(), years(2000, 4), {0.0, 0.0, 0.5, 0.0});
  for (std::uint64_t j = 0; j < 50; ++j) {
    auto stream = generation_stream(3, j);
    const auto s = sample_generation(rates, 0.4, stream);
    CHECK(s.rates()[0] == 0.0);
    CHECK(s.rates()[1] == 0.0);
    CHECK(s.rates()[3] == 0.0);
  }
}

TEST_CASE("sample moments match the assumed gaussian") {
  const InflationSeries one(TimeAxis::yearly(), years(2000, 2), {0.0, 0.2});
  std::vector<double> draws;
  for (std::uint64_t j = 0; j < 4000; ++j) {
    auto stream = generation_stream(11, j);
    draws.push_back(sample_generation(one, 0.25, stream).rates()[1]);
  }
  const auto m = moments(draws);
  CHECK(std::abs(m.mean - 0.2) < 0.002);
  CHECK(std::abs(m.std - 0.05) < 0.002);

  const auto rates = peru();
  const std::size_t gens = 4000;
  std::vector<std::vector<double>> per_k(rates.size());
  for (std::uint64_t j = 0; j < gens; ++j) {
    auto stream = generation_stream(12, j);
    const auto s = sample_generation(rates, 0.25, stream);
    for (std::size_t k = 0; k < s.size(); ++k) per_k[k].push_back(s.rates()[k]);
  }
  const double tol = 3.0 / std::sqrt(static_cast<double>(gens));
  for (std::size_t k = 1; k < rates.size(); ++k) {
    const auto mk = moments(per_k[k]);
    const double i = rates.rates()[k];
    CHECK(std::abs(mk.mean - i) / std::abs(i) < 0.25 * tol);
    CHECK(std::abs(mk.std - 0.25 * std::abs(i)) / (0.25 * std::abs(i)) < tol);
  }
}

TEST_CASE("draws at or below -1 are redrawn and counted") {
  const InflationSeries rates(TimeAxis::yearly(), years(2000, 6), {0.0, 2.0, 2.0, 2.0, 2.0, 2.0});
  std::size_t truncated = 0;
  for (std::uint64_t j = 0; j < 200; ++j) {
    auto stream = generation_stream(5, j);
    const auto s = sample_generation(rates, 1.0, stream, &truncated);
    for (double v : s.rates()) CHECK(v > -1.0);
  }
  CHECK(truncated > 0);
}

TEST_CASE("substreams depend only on seed and generation") {
  auto a = generation_stream(42, 7);
  auto b = generation_stream(42, 7);
  auto c = generation_stream(42, 8);
  auto d = generation_stream(43, 7);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(generation_stream(1ULL << 40, 0)() != generation_stream(0, 0)());
}

TEST_CASE("zero error run reproduces the direct fit") {
  MCConfig mc;
  mc.rel_error = 0.0;
  mc.generations = 10;
  const auto rep = run_mc(peru(), FitConfig{}, mc);
  for (const auto* s : {&rep.tc, &rep.alpha, &rep.c0, &rep.p0, &rep.gamma}) {
    CHECK(s->std == 0.0);
    CHECK(s->mean == s->direct);
    CHECK(s->ratio == 0.0);
    CHECK(s->accepted);
  }
  CHECK(rep.accepted);
  CHECK(rep.non_converged == 0);
  CHECK(rep.reliable);
  CHECK(rep.generations == 10);
  CHECK(rep.t0 == 1969.0);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  MCConfig mc;
  mc.generations = 64;
  mc.seed = 99;
  const auto rates = peru();
  const auto reference = run_mc_serial(rates, FitConfig{}, mc);
  CHECK(run_mc_serial(rates, FitConfig{}, mc) == reference);
  for (int threads : {1, 2, 4}) {
    kernels::set_threads(threads);
    CHECK(run_mc(rates, FitConfig{}, mc) == reference);
  }
  mc.seed = 100;
  CHECK_FALSE(run_mc(rates, FitConfig{}, mc) == reference);
}

TEST_CASE("acceptance is the conjunction of the four ratios") {
  MCConfig mc;
  mc.generations = 200;
  const auto rep = run_mc(peru(), FitConfig{}, mc);
  CHECK(rep.accepted == (rep.tc.accepted && rep.alpha.accepted && rep.c0.accepted && rep.p0.accepted));
  for (const auto* s : {&rep.tc, &rep.alpha, &rep.c0, &rep.p0}) {
    CHECK(s->std >= 0.0);
    CHECK(s->accepted == (s->ratio < mc.threshold));
    CHECK(s->ratio == doctest::Approx(std::abs(s->mean - s->direct) / s->std));
  }
  CHECK(rep.reliable == (rep.non_converged * 20 <= rep.generations));
  std::size_t binned = 0;
  for (auto c : rep.tc_histogram.counts) binned += c;
  CHECK(binned == rep.generations - rep.non_converged);
  CHECK(rep.tc_histogram.counts.size() == mc.histogram_bins);
  CHECK(rep.tc_gaussian == (std::abs(rep.tc_skewness) < 0.5 && std::abs(rep.tc_excess_kurtosis) < 1.0));
}

TEST_CASE("invalid configurations are rejected") {
  MCConfig mc;
  mc.generations = 0;
  CHECK_THROWS_AS(run_mc(peru(), FitConfig{}, mc), DomainError);
  mc.generations = 5;
  mc.rel_error = -0.1;
  CHECK_THROWS_AS(run_mc(peru(), FitConfig{}, mc), DomainError);
  mc.rel_error = 0.1;
  mc.threshold = 0.0;
  CHECK_THROWS_AS(run_mc(peru(), FitConfig{}, mc), DomainError);
  FitConfig capped;
  capped.max_iterations = 0;
  CHECK_THROWS_AS(run_mc(peru(), capped, MCConfig{}), DomainError);
}

TEST_CASE("sweep at zero error is all zero") {
  MCConfig mc;
  mc.generations = 8;
  const auto rows = sweep_error(peru(), FitConfig{}, mc, {0.0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rel_error_percent == 0.0);
  CHECK(rows[0].tc_span_std_percent == 0.0);
  CHECK(rows[0].gamma_std_percent == 0.0);
  CHECK(rows[0].alpha_std == 0.0);
  CHECK(rows[0].c0_std == 0.0);
  CHECK(rows[0].p0_std == 0.0);
}

TEST_CASE("sweep spreads grow with the assumed error") {
  MCConfig mc;
  mc.generations = 300;
  const auto rows = sweep_error(peru(), FitConfig{}, mc, {0.05, 0.10, 0.15, 0.20});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].tc_span_std_percent >= rows[k - 1].tc_span_std_percent);
    CHECK(rows[k].gamma_std_percent >= rows[k - 1].gamma_std_percent);
    CHECK(rows[k].alpha_std >= rows[k - 1].alpha_std);
    CHECK(rows[k].c0_std >= rows[k - 1].c0_std);
    CHECK(rows[k].p0_std >= rows[k - 1].p0_std);
  }
}

TEST_CASE("larger cumulated inflation pins t_c more tightly") {
  const auto de = germany();
  const auto pe = peru();
  const double de_final = build_price_index(de).index().back();
  const double pe_final = build_price_index(pe).index().back();
  CHECK(de_final / pe_final > 300.0);
  MCConfig mc;
  mc.generations = 400;
  const auto rows_de = sweep_error(de, FitConfig{}, mc, {0.35});
  const auto rows_pe = sweep_error(pe, FitConfig{}, mc, {0.35});
  CHECK(rows_de[0].tc_span_std_percent < rows_pe[0].tc_span_std_percent);
}

TEST_CASE("population moments") {
  const auto m = moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(m.skewness == doctest::Approx(0.0));
  CHECK(m.excess_kurtosis == doctest::Approx(1.64 - 3.0));
  const auto skewed = moments({0.0, 0.0, 0.0, 1.0});
  CHECK(skewed.skewness == doctest::Approx(0.09375 / std::pow(0.1875, 1.5)));
  const auto flat = moments({3.0, 3.0});
  CHECK(flat.std == 0.0);
  CHECK(flat.skewness == 0.0);
}

}
