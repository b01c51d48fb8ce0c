#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hyperfit/error.hpp"
#include "hyperfit/report.hpp"
#include "oracles.hpp"

using namespace hyperfit;

namespace {

std::vector<Epoch> months(int year, unsigned month, std::size_t n) {
  std::vector<Epoch> e;
  for (std::size_t k = 0; k < n; ++k) {
    const unsigned m = month - 1 + static_cast<unsigned>(k);
    e.push_back(Epoch{year + static_cast<int>(m / 12), m % 12 + 1});
  }
  return e;
}

AnalysisReport germany_report() {
  const auto axis = TimeAxis::monthly_from(Epoch{1921, 5}, DayConvention::mid);
  const double tc = axis.to_time(Epoch{1924, 1, 5});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> p;
  const auto epochs = months(1921, 5, 31);
  for (const auto& e : epochs) {
    p.push_back(std::exp(oracle::power_law(tc, 0.56, 0.103 / axis.period(), 0.57, 0.0, axis.to_time(e)) + noise(rng)));
  }
  const PriceIndexSeries idx(axis, epochs, p);
  const auto fit = fit_singularity(idx, FitConfig{});
  return make_report(fit, axis, "germany.csv", parse_window("1921-05:1923-11"));
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("doubles print in shortest round-trip form") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::exp(u(rng)) * (k % 2 ? 1.0 : -1.0);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1991.29) == "1991.29");
  CHECK(std::isinf(parse_double(format_double(INFINITY))));
  CHECK(std::isnan(parse_double(format_double(NAN))));
  CHECK_THROWS_AS(parse_double("1.5x"), InputError);
}

TEST_CASE("fit reports round trip losslessly") {
  const auto rep = germany_report();
  const auto text = to_text(rep);
  CHECK(text.rfind("format = hyperfit-report/1\n", 0) == 0);
  const auto back = parse_report(text);
  CHECK(back == rep);
  CHECK(to_text(back) == text);
  CHECK(text.find("window = 1921-05:1923-11") != std::string::npos);
  CHECK(text.find("origin = 1921-05-15") != std::string::npos);
  CHECK(text.find("time_unit = day") != std::string::npos);
}

TEST_CASE("reports with Monte Carlo summaries round trip") {
  auto rep = germany_report();
  MCReport mc;
  mc.rel_error = 0.25;
  mc.generations = 4000;
  mc.seed = 18446744073709551615ULL;
  mc.threshold = 0.1;
  mc.t0 = 0.0;
  mc.tc = {965.2, 965.9, 11.3, 0.06, true};
  mc.alpha = {0.56, 0.57, 0.12, 0.08, true};
  mc.c0 = {0.0034, 0.0033, 0.0004, 0.05, true};
  mc.p0 = {0.57, 0.58, 0.09, 0.11, false};
  mc.gamma = {1.64, 1.63, 0.05, 0.2, false};
  mc.non_converged = 3;
  mc.truncated_draws = 12;
  mc.tc_histogram = {940.0, 1000.0, {1, 0, 5, 9, 2}};
  mc.tc_skewness = 0.3;
  mc.tc_excess_kurtosis = -0.2;
  mc.tc_gaussian = true;
  rep.mc = mc;
  rep.warnings = {"first warning", "second = with equals"};
  const auto text = to_text(rep);
  CHECK(parse_report(text) == rep);
  CHECK(text.find("mc.seed = 18446744073709551615") != std::string::npos);
}

TEST_CASE("derived values are recomputed from the parameters") {
  const auto rep = germany_report();
  const auto d = derive(rep);
  const auto& p = std::get<SingularityParams>(rep.params);
  const auto ab = ab_coefficients(p);
  CHECK(*d.a == ab.a);
  CHECK(*d.b == ab.b);
  CHECK(*d.gamma == alpha_to_gamma(p.alpha));
  CHECK(d.c0_per_period == p.c0 * 365.25 / 12.0);
  CHECK(*d.tc_date == rep.axis.format_time(p.tc));

  AnalysisReport lin;
  lin.axis = TimeAxis::yearly();
  lin.model = ModelKind::linear;
  lin.params = LinearParams{0.5, 0.2, 1950.0};
  const auto dl = derive(lin);
  CHECK_FALSE(dl.gamma.has_value());
  CHECK(dl.c0_per_period == 0.2);
  CHECK(parse_report(to_text(lin)) == lin);

  AnalysisReport de = lin;
  de.model = ModelKind::double_exp;
  de.params = DoubleExpParams{0.5, 0.2, 0.01, 1950.0};
  CHECK(parse_report(to_text(de)) == de);
}

TEST_CASE("reloaded parameters predict bit for bit") {
  const auto rep = germany_report();
  const auto back = parse_report(to_text(rep));
  const auto& p = std::get<SingularityParams>(rep.params);
  for (double f = 0.0; f < 0.999; f += 0.01) {
    const double t = p.t0 + f * (p.tc - p.t0);
    CHECK(eval_model(back.params, t) == eval_model(rep.params, t));
  }
}

TEST_CASE("malformed reports are rejected") {
  const auto text = to_text(germany_report());
  CHECK_THROWS_AS(parse_report("format = other/2\n"), InputError);
  CHECK_THROWS_AS(parse_report("no equals sign\n"), InputError);
  std::string missing = text;
  missing.erase(missing.find("alpha = "), missing.find('\n', missing.find("alpha = ")) - missing.find("alpha = ") + 1);
  CHECK_THROWS_AS(parse_report(missing), InputError);
  std::string bad = text;
  bad.replace(bad.find("converged = true"), 16, "converged = maybe");
  CHECK_THROWS_AS(parse_report(bad), InputError);
  CHECK(parse_report("# leading comment\n\n" + text) == parse_report(text));
}

}
