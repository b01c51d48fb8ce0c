#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hyperfit/cli.hpp"
#include "hyperfit/error.hpp"
#include "hyperfit/fitting.hpp"
#include "hyperfit/models.hpp"
#include "hyperfit/montecarlo.hpp"
#include "hyperfit/series.hpp"

using namespace hyperfit;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict = Verdict::fail;
  std::string detail;
};

struct Row {
  std::string name;
  std::string from;
  std::string to;
  std::string tc;
  double alpha;
  double c0;  // per sampling period
  double p0;
  DayConvention day = DayConvention::mid;
};

const std::vector<Row>& reference_rows() {
  static const std::vector<Row> rows{
      {"peru", "1969", "1990", "1991.29", 0.29, 0.18, -0.38},
      {"zimbabwe", "1980", "2007", "2009.50", 0.79, 0.08, 0.10},
      {"germany", "1921-05", "1923-11", "1924-01-05", 0.56, 0.103, 0.57},
      {"greece", "1943-02", "1944-10", "1944-12-02", 0.17, 0.21, 3.91, DayConvention::end},
      {"yugoslavia", "1990-12", "1994-01", "1994-03-10", 0.53, 0.335, -1.52},
  };
  return rows;
}

struct Setup {
  TimeAxis axis;
  std::vector<Epoch> epochs;
  SingularityParams params;
};

Setup setup(const Row& row) {
  const Epoch first = parse_epoch(row.from);
  const Epoch last = parse_epoch(row.to);
  const bool monthly = first.resolution() == Resolution::monthly;
  Setup s{monthly ? TimeAxis::monthly_from(first, row.day) : TimeAxis::yearly(), {}, {}};
  for (Epoch e = first; e <= last;) {
    s.epochs.push_back(e);
    if (monthly) {
      e.month = e.month % 12 + 1;
      if (e.month == 1) ++e.year;
    } else {
      ++e.year;
    }
  }
  const double period = s.axis.period();
  s.params = SingularityParams{s.axis.parse_time(row.tc), row.alpha, row.c0 / period, row.p0, s.axis.to_time(first)};
  return s;
}

PriceIndexSeries noiseless(const Setup& s) {
  std::vector<double> index;
  for (const auto& e : s.epochs) index.push_back(std::exp(eval_singularity(s.params, s.axis.to_time(e))));
  return PriceIndexSeries(s.axis, s.epochs, index);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k] / n;
    my += y[k] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
}

Outcome round_trip() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& row : reference_rows()) {
    const auto s = setup(row);
    FitConfig cfg;
    const auto fit = fit_singularity(noiseless(s), cfg);
    const auto& p = std::get<SingularityParams>(fit.params);
    // t_c is compared through its distance from t0 so the calendar offset of the axis drops out.
    const double worst = std::max({rel(p.tc - p.t0, s.params.tc - s.params.t0), rel(p.alpha, s.params.alpha),
                                   rel(p.c0, s.params.c0), rel(p.p0, s.params.p0)});
    const bool row_ok = worst < 1e-3 && fit.chi < 1e-6;
    ok = ok && row_ok;
    detail += fmt::format("{} rel={:.1e} chi={:.1e}; ", row.name, worst, fit.chi);
  }
  const double secs = seconds_since(start);
  ok = ok && secs < 5.0;
  return {ok ? Verdict::pass : Verdict::fail, detail + fmt::format("{:.2f}s (limit 5s)", secs)};
}

Outcome coefficients() {
  const auto peru = ab_coefficients({1991.29, 0.29, 0.18, -0.38, 1969.0});
  const auto g = setup(reference_rows()[2]);
  const auto germany = ab_coefficients(g.params);
  const bool ok = std::abs(peru.a + 14.16) <= 0.15 && std::abs(peru.b - 34.0) <= 1.0 &&
                  std::abs(germany.a + 5.22) <= 0.2 && std::abs(germany.b - 274.0) <= 10.0;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("peru A={:.3f} B={:.2f}; germany (days) A={:.3f} B={:.1f}", peru.a, peru.b, germany.a,
                      germany.b)};
}

Outcome exponents() {
  const std::vector<std::pair<double, double>> cases{{0.29, 1.78}, {0.56, 1.64}, {0.53, 1.65}, {0.79, 1.56}};
  bool ok = true;
  std::string detail;
  for (const auto& [alpha, gamma] : cases) {
    const double g = alpha_to_gamma(alpha);
    ok = ok && std::abs(g - gamma) <= 0.01;
    detail += fmt::format("{}->{:.4f} ", alpha, g);
  }
  return {ok ? Verdict::pass : Verdict::fail, detail};
}

Outcome monte_carlo(const fs::path& data_dir) {
  const auto start = std::chrono::steady_clock::now();
  LoadOptions lo;
  lo.kind = SeriesKind::rate;
  const auto rates = load_series(data_dir / "peru_synthetic.csv", lo).as_rates();
  const FitConfig fit_cfg;
  MCConfig mc;
  mc.rel_error = 0.25;
  mc.generations = 4000;
  mc.seed = 1;
  const auto rep = run_mc(rates, fit_cfg, mc);
  const bool a = rep.accepted;
  const bool b = std::abs(rep.tc_skewness) < 0.5;

  const std::vector<double> errors{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  const auto rows = sweep_error(rates, fit_cfg, mc, errors);
  std::vector<std::vector<double>> cols(5);
  for (const auto& r : rows) {
    cols[0].push_back(r.tc_span_std_percent);
    cols[1].push_back(r.gamma_std_percent);
    cols[2].push_back(r.alpha_std);
    cols[3].push_back(r.c0_std);
    cols[4].push_back(r.p0_std);
  }
  bool monotone = true;
  double worst_r2 = 1.0;
  for (const auto& col : cols) {
    for (std::size_t k = 1; k < col.size(); ++k) monotone = monotone && col[k] >= col[k - 1];
    worst_r2 = std::min(worst_r2, r_squared(errors, col));
  }
  const bool c = monotone && worst_r2 > 0.98;
  const double secs = seconds_since(start);
  const bool fast = secs < 120.0;
  return {a && b && c && fast ? Verdict::pass : Verdict::fail,
          fmt::format("(a) {} ratios tc={:.3f} alpha={:.3f} c0={:.3f} p0={:.3f}; (b) {} skew={:.3f}; (c) {} "
                      "min R2={:.4f} monotone={}; {:.1f}s (limit 120s)",
                      a ? "pass" : "FAIL", rep.tc.ratio, rep.alpha.ratio, rep.c0.ratio, rep.p0.ratio,
                      b ? "pass" : "FAIL", rep.tc_skewness, c ? "pass" : "FAIL", worst_r2, monotone,
                      secs)};
}

Outcome ode_recursion() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> ug(1.5, 2.5), ur(0.05, 1.0), ua(0.1, 2.0);
  bool ode_ok = true;
  bool rec_ok = true;
  double worst_ode = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double gamma = ug(rng), r0 = ur(rng), a1 = ua(rng);
    const double tc = critical_time(r0, gamma, a1, 0.0);
    const auto ode = integrate_growth_ode(r0, gamma, a1, 0.0, 1e30, 2.0 * tc);
    const double err = ode.reached ? rel(ode.t, tc) : 1.0;
    worst_ode = std::max(worst_ode, err);
    ode_ok = ode_ok && err < 1e-4;

    double prev = INFINITY;
    for (int level = 0; level < 3; ++level) {
      const double dt = tc / (100.0 * std::pow(2.0, level));
      const auto trace = simulate_recursion({r0, 2.0 * a1 * dt, gamma, dt}, static_cast<std::size_t>(4.0 * tc / dt));
      std::size_t n = 0;
      while (n < trace.r.size() && std::isfinite(trace.r[n]) && trace.r[n] < 1e12) ++n;
      if (n == trace.r.size()) {
        rec_ok = false;
        break;
      }
      const double e = std::abs(static_cast<double>(n) * dt - tc);
      rec_ok = rec_ok && e < prev;
      prev = e;
    }
  }
  const double secs = seconds_since(start);
  const bool ok = ode_ok && rec_ok && secs < 10.0;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("ode worst rel={:.2e}; recursion monotone={}; {:.2f}s (limit 10s)", worst_ode, rec_ok, secs)};
}

double exact_doubling_error(const SingularityParams& p, double t) {
  const double tau = doubling_time(p, t);
  if (t + tau >= p.tc) return INFINITY;
  return std::abs((eval_singularity(p, t + tau) - eval_singularity(p, t)) / std::numbers::ln2 - 1.0);
}

Outcome doubling() {
  double worst_forms = 0.0;
  double worst_exact = 0.0;
  std::string exact_detail;
  for (const auto& row : reference_rows()) {
    const auto s = setup(row);
    const auto ab = ab_coefficients(s.params);
    const PowerLawAB pl{s.params.alpha, ab.b, s.params.tc};
    const double T = s.params.tc - s.params.t0;
    double row_exact = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double t = s.params.t0 + T * (0.9 + 0.1 * k / 200.0);
      worst_forms = std::max(worst_forms, rel(doubling_time(pl, t), doubling_time(s.params, t)));
      row_exact = std::max(row_exact, exact_doubling_error(s.params, t));
    }
    worst_exact = std::max(worst_exact, row_exact);
    exact_detail += fmt::format("{}={:.2g}% ", row.name, 100.0 * row_exact);
  }
  const bool forms = worst_forms <= 1e-12;
  const bool exact = worst_exact <= 0.01;

  // Last 180 days before t_c, on day axes.
  std::vector<std::pair<std::string, PowerLawAB>> curves;
  for (const auto& row : reference_rows()) {
    if (row.name == "peru" || row.name == "zimbabwe") continue;
    const auto s = setup(row);
    curves.emplace_back(row.name, PowerLawAB{s.params.alpha, ab_coefficients(s.params).b, s.params.tc});
  }
  curves.emplace_back("hungary", PowerLawAB{gamma_to_alpha(1.5), 2370.0, 0.0});
  bool ordering = true;
  for (int d = 1; d <= 180; ++d) {
    auto tau = [&](const std::string& name) {
      for (const auto& [n, pl] : curves) {
        if (n == name) return doubling_time(pl, pl.tc - d);
      }
      return std::numeric_limits<double>::quiet_NaN();
    };
    ordering = ordering && std::max(tau("yugoslavia"), tau("hungary")) < std::min(tau("germany"), tau("greece"));
  }
  const bool ok = forms && exact && ordering;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("closed forms {} (worst {:.1e}); exact doubling {} (worst {}); ordering {}",
                      forms ? "pass" : "FAIL", worst_forms, exact ? "pass" : "FAIL", exact_detail,
                      ordering ? "pass" : "FAIL")};
}

Outcome prediction() {
  const SingularityParams z{2009.50, 0.79, 0.08, 0.10, 1979.0};
  const double p = eval_singularity(z, 2008.0);
  const double price = std::exp(p);
  const double yoy = 100.0 * std::expm1(p - eval_singularity(z, 2007.0));
  const bool ok = rel(price, 8.26e12) <= 0.02 && rel(yoy, 5e6) <= 0.10;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("P={:.3e} (want 8.26e12 +-2%) yoy={:.3e}% (want 5e6% +-10%)", price, yoy)};
}

std::string run_text(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hyperfit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

Outcome determinism(const fs::path& data_dir) {
  const std::string file = (data_dir / "peru_synthetic.csv").string();
  const std::vector<std::string> base{"mc", file, "--m", "500", "--seed", "20070101"};
  auto with_threads = [&](const std::string& n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run_text(args);
  };
  const auto first = run_text(base);
  const bool ok = first.rfind("0\n", 0) == 0 && run_text(base) == first && with_threads("1") == first &&
                  with_threads("2") == first && with_threads("4") == first;
  return {ok ? Verdict::pass : Verdict::fail, "two runs and 1/2/4 workers byte-identical: " + std::string(ok ? "yes" : "no")};
}

Outcome real_data(const fs::path& data_dir) {
  const auto peru_file = data_dir / "real" / "peru.csv";
  const auto germany_file = data_dir / "real" / "germany.csv";
  if (!fs::exists(peru_file) && !fs::exists(germany_file)) {
    return {Verdict::skip, "no user-supplied series under " + (data_dir / "real").string()};
  }
  bool ok = true;
  std::string detail;
  if (fs::exists(peru_file)) {
    LoadOptions lo;
    lo.kind = SeriesKind::rate;
    const auto idx = load_series(peru_file, lo).as_index();
    FitConfig cfg;
    cfg.window = EpochWindow{Epoch{1969}, Epoch{1990}};
    const auto fit = fit_singularity(idx, cfg);
    const auto& p = std::get<SingularityParams>(fit.params);
    const double chi_k = chi_from_residuals(fit.residuals, ChiDivisor::n_minus_k, fit.n_params);
    const bool peru_ok = p.tc >= 1990.9 && p.tc <= 1991.7 && p.alpha >= 0.16 && p.alpha <= 0.42 &&
                         std::min(fit.chi, chi_k) <= 0.35;
    ok = ok && peru_ok;
    detail += fmt::format("peru tc={:.3f} alpha={:.3f} chi={:.3f}; ", p.tc, p.alpha, fit.chi);
  }
  if (fs::exists(germany_file)) {
    LoadOptions lo;
    lo.kind = SeriesKind::index;
    const auto idx = load_series(germany_file, lo).as_index();
    FitConfig cfg;
    cfg.window = parse_window("1921-05:1923-11");
    const auto fit = fit_singularity(idx, cfg);
    const auto& p = std::get<SingularityParams>(fit.params);
    const double lo_t = idx.axis().parse_time("1923-12-20");
    const double hi_t = idx.axis().parse_time("1924-01-20");
    ok = ok && p.tc >= lo_t && p.tc <= hi_t;
    detail += "germany tc=" + idx.axis().format_time(p.tc);
  }
  return {ok ? Verdict::pass : Verdict::fail, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks for hyperfit"};
  int only = 0;
  std::string data_dir = HYPERFIT_DATA_DIR;
  app.add_option("--only", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--data-dir", data_dir)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const fs::path dir(data_dir);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"round-trip fitting", round_trip},
      {"derived coefficients", coefficients},
      {"exponent conversion", exponents},
      {"monte carlo", [&] { return monte_carlo(dir); }},
      {"ode and recursion", ode_recursion},
      {"doubling time", doubling},
      {"prediction", prediction},
      {"determinism", [&] { return determinism(dir); }},
      {"real data", [&] { return real_data(dir); }},
  };

  bool all_ok = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::skip ? "SKIP" : "FAIL";
    std::cout << fmt::format("[{}] criterion {} {}: {}", tag, k + 1, criteria[k].first, o.detail) << std::endl;
    all_ok = all_ok && o.verdict != Verdict::fail;
  }
  return all_ok ? 0 : 1;
}
