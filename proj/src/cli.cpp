#include "hyperfit/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hyperfit/error.hpp"
#include "hyperfit/fitting.hpp"
#include "hyperfit/kernels.hpp"
#include "hyperfit/montecarlo.hpp"
#include "hyperfit/report.hpp"
#include "hyperfit/series.hpp"

namespace hyperfit {

namespace {

struct InputFlags {
  std::string file;
  std::string kind = "rate";
  std::string units = "fraction";
  std::string day_convention = "mid";
  std::string year_convention = "start";
  std::string window;
};

struct FitFlags {
  std::string model = "singularity";
  std::string chi_divisor = "n";
  bool fix_p0 = false;
  int threads = 0;
  std::string out;
};

struct McFlags {
  double di = 0.25;
  std::size_t m = 4000;
  std::optional<std::uint64_t> seed;
  double threshold = 0.1;
  std::size_t bins = 30;
  std::string sweep;
};

// Explicit model parameters, as an alternative to a report file.
struct ParamFlags {
  std::string report;
  std::string model = "singularity";
  std::string resolution = "yearly";
  std::string origin;
  std::string day_convention = "mid";
  std::string year_convention = "start";
  std::optional<std::string> tc;
  std::optional<std::string> t0;
  double alpha = 0.0;
  double c0 = 0.0;
  double p0 = 0.0;
  double b2 = 0.0;
  std::optional<double> a_coef;
  std::optional<double> b_coef;
};

struct CurveFlags {
  std::string quantity = "logprice";
  std::string from;
  std::string to;
  std::size_t points = 200;
};

struct SynthFlags {
  std::string model = "singularity";
  std::string from;
  std::string to;
  std::string lead_from;
  std::string kind = "index";
  std::string day_convention = "mid";
  std::string year_convention = "start";
  std::string tc;
  double alpha = 0.5;
  double c0 = 0.1;
  double p0 = 0.0;
  double b2 = 0.0;
  std::string label = "synthetic";
  std::string out;
};

void add_input_options(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("file", f.file, "CSV input (date,value)")->required();
  cmd->add_option("--kind", f.kind, "value column: rate or index")->capture_default_str();
  cmd->add_option("--units", f.units, "fraction or percent")->capture_default_str();
  cmd->add_option("--day-convention", f.day_convention, "mid or end of month")->capture_default_str();
  cmd->add_option("--year-convention", f.year_convention, "start, mid or end of year")->capture_default_str();
  cmd->add_option("--window", f.window, "FROM:TO, inclusive");
}

void add_fit_options(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--model", f.model, "linear, doubleexp or singularity")->capture_default_str();
  cmd->add_option("--chi-divisor", f.chi_divisor, "n or n-k")->capture_default_str();
  cmd->add_flag("--fix-p0", f.fix_p0, "hold p0 at the first log price");
  cmd->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
  cmd->add_option("--out", f.out, "also write the report to this file");
}

void add_param_options(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--report", f.report, "report file written by fit or mc");
  cmd->add_option("--model", f.model, "model of explicit parameters")->capture_default_str();
  cmd->add_option("--resolution", f.resolution, "yearly or monthly axis")->capture_default_str();
  cmd->add_option("--origin", f.origin, "day 0 of a monthly axis (YYYY-MM-DD)");
  cmd->add_option("--day-convention", f.day_convention, "mid or end of month")->capture_default_str();
  cmd->add_option("--year-convention", f.year_convention, "start, mid or end of year")->capture_default_str();
  cmd->add_option("--tc", f.tc, "critical time (date or axis units)");
  cmd->add_option("--t0", f.t0, "start of the fit (date or axis units)");
  cmd->add_option("--alpha", f.alpha);
  cmd->add_option("--c0", f.c0, "growth of ln P per period");
  cmd->add_option("--p0", f.p0);
  cmd->add_option("--b2", f.b2, "double exponential rate per period");
  cmd->add_option("--A", f.a_coef, "A of p = A + B (tc - t)^-alpha");
  cmd->add_option("--B", f.b_coef, "B of p = A + B (tc - t)^-alpha, axis units");
}

LoadOptions load_options(const InputFlags& f) {
  LoadOptions o;
  o.kind = parse_kind(f.kind);
  o.units = parse_units(f.units);
  o.day_convention = parse_day_convention(f.day_convention);
  o.year_convention = parse_year_convention(f.year_convention);
  return o;
}

std::optional<EpochWindow> window_of(const InputFlags& f) {
  if (f.window.empty()) return std::nullopt;
  return parse_window(f.window);
}

FitConfig fit_config(const FitFlags& f, const std::optional<EpochWindow>& window) {
  FitConfig c;
  c.model = parse_model(f.model);
  c.window = window;
  c.chi_divisor = parse_chi_divisor(f.chi_divisor);
  c.fix_p0 = f.fix_p0;
  return c;
}

void apply_threads(int threads) {
  if (threads < 0) throw InputError("--threads must be non-negative");
  if (threads > 0) kernels::set_threads(threads);
}

std::string dataset_name(const std::string& file) { return std::filesystem::path(file).filename().string(); }

void emit_report(const AnalysisReport& report, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const std::string text = to_text(report);
  out << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    f << text;
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv("HYPERFIT_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (env[used] != '\0') throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("HYPERFIT_SEED is not an unsigned integer: '") + env + "'");
  }
}

std::vector<double> parse_sweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_double(item));
  if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0]) || !(parts[0] >= 0.0)) {
    throw InputError("--sweep expects FROM:TO:STEP in percent with STEP > 0");
  }
  std::vector<double> out;
  const double eps = 1e-9 * parts[2];
  for (int k = 0;; ++k) {
    const double v = parts[0] + k * parts[2];
    if (v > parts[1] + eps) break;
    out.push_back(v);
  }
  return out;
}

struct ModelSource {
  TimeAxis axis;
  ModelParams params;
};

ModelSource model_source(const ParamFlags& f, const std::optional<std::string>& fallback_t0) {
  if (!f.report.empty()) {
    std::ifstream in(f.report);
    if (!in) throw InputError("cannot open report '" + f.report + "'");
    const AnalysisReport r = read_report(in);
    return {r.axis, r.params};
  }
  ModelSource s;
  const Resolution res = parse_resolution(f.resolution);
  if (res == Resolution::yearly) {
    s.axis = TimeAxis::yearly(parse_year_convention(f.year_convention));
  } else {
    if (f.origin.empty()) throw InputError("--origin is required for a monthly axis");
    const Epoch o = parse_epoch(f.origin);
    if (o.month == 0) throw InputError("--origin must be a date");
    s.axis = TimeAxis::monthly_from(o, parse_day_convention(f.day_convention));
  }
  const double period = s.axis.period();
  const auto t0_text = f.t0 ? f.t0 : fallback_t0;
  if (!t0_text) throw InputError("--t0 is required with explicit parameters");
  const double t0 = s.axis.parse_time(*t0_text);
  switch (parse_model(f.model)) {
    case ModelKind::linear: s.params = LinearParams{f.p0, f.c0 / period, t0}; break;
    case ModelKind::double_exp: s.params = DoubleExpParams{f.p0, f.c0 / period, f.b2 / period, t0}; break;
    case ModelKind::singularity: {
      if (!f.tc) throw InputError("--tc is required for the singularity model");
      const double tc = s.axis.parse_time(*f.tc);
      if (!(tc > t0)) throw DomainError("t_c must lie after t0");
      if (!(f.alpha > 0.0)) throw DomainError("alpha must be positive");
      SingularityParams p{tc, f.alpha, f.c0 / period, f.p0, t0};
      if (f.b_coef) {
        const double span = tc - t0;
        p.c0 = f.alpha * *f.b_coef / std::pow(span, 1.0 + f.alpha);
        p.p0 = f.a_coef.value_or(0.0) + *f.b_coef / std::pow(span, f.alpha);
      }
      s.params = p;
      break;
    }
  }
  return s;
}

std::optional<double> model_tc(const ModelParams& params) {
  if (const auto* s = std::get_if<SingularityParams>(&params)) return s->tc;
  return std::nullopt;
}

double curve_value(const ModelParams& params, const std::string& quantity, double period, double t) {
  if (quantity == "logprice") return eval_model(params, t);
  if (quantity == "price") return std::exp(eval_model(params, t));
  if (quantity == "rate") {
    return std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LinearParams>) {
            return p.c0 * period;
          } else if constexpr (std::is_same_v<P, DoubleExpParams>) {
            return p.c0 * period * std::exp(p.b2 * (t - p.t0));
          } else {
            return growth_rate_curve(p, period, t);
          }
        },
        params);
  }
  if (quantity == "doubling") {
    return std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LinearParams>) {
            return p.c0 > 0.0 ? std::log(2.0) / p.c0 : std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<P, DoubleExpParams>) {
            if (!(p.c0 > 0.0)) return std::numeric_limits<double>::infinity();
            const double slope = p.c0 * std::exp(p.b2 * (t - p.t0));
            if (p.b2 == 0.0) return std::log(2.0) / slope;
            return std::log1p(std::log(2.0) * p.b2 / slope) / p.b2;
          } else {
            return doubling_time(p, t);
          }
        },
        params);
  }
  throw InputError("unknown --quantity '" + quantity + "' (logprice, price, rate, doubling)");
}

int cmd_fit(const InputFlags& in, const FitFlags& ff, std::ostream& out, std::ostream& err) {
  apply_threads(ff.threads);
  const LoadedSeries loaded = load_series(std::filesystem::path(in.file), load_options(in));
  const PriceIndexSeries index = loaded.as_index();
  const auto window = window_of(in);
  const FitResult result = fit(index, fit_config(ff, window));
  AnalysisReport report = make_report(result, index.axis(), dataset_name(in.file), window);
  report.warnings.insert(report.warnings.begin(), loaded.warnings.begin(), loaded.warnings.end());
  emit_report(report, ff.out, out, err);
  return kExitOk;
}

int cmd_mc(const InputFlags& in, const FitFlags& ff, const McFlags& mf, std::ostream& out, std::ostream& err) {
  apply_threads(ff.threads);
  const LoadedSeries loaded = load_series(std::filesystem::path(in.file), load_options(in));
  const auto window = window_of(in);
  const PriceIndexSeries full = loaded.as_index();
  const InflationSeries rates = rates_from_index(window ? slice(full, *window) : full);

  FitConfig config = fit_config(ff, std::nullopt);
  if (config.model != ModelKind::singularity) throw InputError("Monte Carlo supports only --model singularity");
  MCConfig mc;
  mc.rel_error = mf.di;
  mc.generations = mf.m;
  mc.seed = mf.seed ? *mf.seed : seed_from_env();
  mc.threshold = mf.threshold;
  mc.histogram_bins = mf.bins;

  if (!mf.sweep.empty()) {
    const auto percents = parse_sweep(mf.sweep);
    std::vector<double> errors;
    for (const double v : percents) errors.push_back(v / 100.0);
    const auto rows = sweep_error(rates, config, mc, errors);
    out << "di_percent,tc_std_percent,gamma_std_percent,alpha_std,c0_std,p0_std,accepted,reliable\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      out << format_double(percents[k]) << ',' << format_double(r.tc_span_std_percent) << ','
          << format_double(r.gamma_std_percent) << ',' << format_double(r.alpha_std) << ','
          << format_double(r.c0_std) << ',' << format_double(r.p0_std) << ',' << (r.accepted ? 1 : 0) << ','
          << (r.reliable ? 1 : 0) << '\n';
    }
    return kExitOk;
  }

  const PriceIndexSeries index = build_price_index(rates);
  const FitResult result = fit(index, config);
  AnalysisReport report = make_report(result, index.axis(), dataset_name(in.file), window);
  report.warnings.insert(report.warnings.begin(), loaded.warnings.begin(), loaded.warnings.end());
  report.mc = run_mc(rates, config, mc);
  if (!report.mc->reliable) report.warnings.push_back("more than 5% of the generations did not converge");
  emit_report(report, ff.out, out, err);
  return kExitOk;
}

int cmd_curve(const ParamFlags& pf, const CurveFlags& cf, std::ostream& out, std::ostream& err) {
  if (cf.from.empty() || cf.to.empty()) throw InputError("--from and --to are required");
  if (cf.points < 2) throw InputError("--points must be at least 2");
  const ModelSource src = model_source(pf, cf.from);
  const double from = src.axis.parse_time(cf.from);
  const double to = src.axis.parse_time(cf.to);
  if (!(to > from)) throw InputError("--to must lie after --from");
  const auto tc = model_tc(src.params);
  if (tc && !(from < *tc)) throw DomainError("curve range starts at or beyond the singularity");
  const double period = src.axis.period();

  out << "t,value\n";
  bool clipped = false;
  for (std::size_t k = 0; k < cf.points; ++k) {
    const double t = k + 1 == cf.points
                         ? to
                         : from + (to - from) * static_cast<double>(k) / static_cast<double>(cf.points - 1);
    if (tc && !(t < *tc)) {
      clipped = true;
      break;
    }
    out << format_double(t) << ',' << format_double(curve_value(src.params, cf.quantity, period, t)) << '\n';
  }
  if (clipped) err << "warning: curve clipped below t_c = " << src.axis.format_time(*tc) << '\n';
  return kExitOk;
}

int cmd_predict(const ParamFlags& pf, const std::string& at, std::ostream& out) {
  if (at.empty()) throw InputError("--at is required");
  const ModelSource src = model_source(pf, std::nullopt);
  const double t = src.axis.parse_time(at);
  const auto tc = model_tc(src.params);
  if (tc && !(t < *tc)) {
    throw DomainError("target " + src.axis.format_time(t) + " is beyond singularity t_c = " +
                      src.axis.format_time(*tc));
  }
  const double p = eval_model(src.params, t);
  const double p_prev = eval_model(src.params, t - src.axis.year_length());
  out << "t = " << format_double(t) << '\n';
  out << "date = " << src.axis.format_time(t) << '\n';
  out << "log_price = " << format_double(p) << '\n';
  out << "price = " << format_double(std::exp(p)) << '\n';
  out << "yoy_percent = " << format_double(100.0 * std::expm1(p - p_prev)) << '\n';
  return kExitOk;
}

int cmd_synth(const SynthFlags& sf, std::ostream& out) {
  if (sf.from.empty() || sf.to.empty()) throw InputError("--from and --to are required");
  const Epoch first = parse_epoch(sf.from);
  const Epoch last = parse_epoch(sf.to);
  const Epoch lead = sf.lead_from.empty() ? first : parse_epoch(sf.lead_from);
  if (first.resolution() != last.resolution() || lead.resolution() != first.resolution()) {
    throw InputError("--from, --to and --lead-from must share a resolution");
  }
  if (first.day != 0 || last.day != 0 || lead.day != 0) throw InputError("synth epochs take no day");
  if (!(first <= last) || !(lead <= first)) throw InputError("expected --lead-from <= --from <= --to");

  const bool monthly = first.resolution() == Resolution::monthly;
  const TimeAxis axis = monthly ? TimeAxis::monthly_from(lead, parse_day_convention(sf.day_convention))
                                : TimeAxis::yearly(parse_year_convention(sf.year_convention));
  const double period = axis.period();
  const double t0 = axis.to_time(first);

  ModelParams params;
  switch (parse_model(sf.model)) {
    case ModelKind::linear: params = LinearParams{sf.p0, sf.c0 / period, t0}; break;
    case ModelKind::double_exp: params = DoubleExpParams{sf.p0, sf.c0 / period, sf.b2 / period, t0}; break;
    case ModelKind::singularity:
      if (sf.tc.empty()) throw InputError("--tc is required for the singularity model");
      params = SingularityParams{axis.parse_time(sf.tc), sf.alpha, sf.c0 / period, sf.p0, t0};
      break;
  }
  const SeriesKind kind = parse_kind(sf.kind);

  std::vector<Epoch> epochs;
  for (Epoch e = lead; e <= last;) {
    epochs.push_back(e);
    if (monthly) {
      e.month = e.month == 12 ? 1 : e.month + 1;
      if (e.month == 1) ++e.year;
    } else {
      ++e.year;
    }
  }

  std::vector<double> logp;
  for (const Epoch& e : epochs) {
    const double t = axis.to_time(e);
    // Before t0 the series follows the tangent line through (t0, p0).
    if (t < t0) {
      const double slope = std::visit([](const auto& p) { return p.c0; }, params);
      logp.push_back(std::visit([](const auto& p) { return p.p0; }, params) + slope * (t - t0));
    } else {
      logp.push_back(eval_model(params, t));
    }
  }

  std::ostringstream body;
  body << "# " << sf.label << " " << to_string(parse_model(sf.model)) << " fixture, not measured data\n";
  body << "# model t0 = " << format_epoch(first) << ", c0 per period = " << format_double(sf.c0)
       << ", p0 = " << format_double(sf.p0);
  if (const auto tc = model_tc(params)) {
    body << ", tc = " << axis.format_time(*tc) << ", alpha = " << format_double(sf.alpha);
  }
  if (parse_model(sf.model) == ModelKind::double_exp) body << ", b2 per period = " << format_double(sf.b2);
  body << '\n';
  body << "date," << (kind == SeriesKind::index ? "index" : "rate") << '\n';
  for (std::size_t k = 0; k < epochs.size(); ++k) {
    const double v = kind == SeriesKind::index ? std::exp(logp[k]) : (k == 0 ? 0.0 : std::expm1(logp[k] - logp[k - 1]));
    body << format_epoch(epochs[k]) << ',' << format_double(v) << '\n';
  }

  if (sf.out.empty()) {
    out << body.str();
  } else {
    std::ofstream f(sf.out);
    if (!f) throw InputError("cannot write '" + sf.out + "'");
    f << body.str();
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit hyperinflation price indices to linear, double-exponential and finite-time-singularity models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");
#ifdef HYPERFIT_VERSION
  app.set_version_flag("--version", std::string(HYPERFIT_VERSION));
#endif

  InputFlags fit_in, mc_in;
  FitFlags fit_ff, mc_ff;
  McFlags mf;
  ParamFlags curve_pf, predict_pf;
  CurveFlags cf;
  SynthFlags sf;
  std::string at;

  auto* fit_cmd = app.add_subcommand("fit", "fit one model and print a report");
  add_input_options(fit_cmd, fit_in);
  add_fit_options(fit_cmd, fit_ff);

  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo uncertainties of a singularity fit");
  add_input_options(mc_cmd, mc_in);
  add_fit_options(mc_cmd, mc_ff);
  mc_cmd->add_option("--di", mf.di, "relative error of every rate")->capture_default_str();
  mc_cmd->add_option("--m", mf.m, "number of generations")->capture_default_str();
  mc_cmd->add_option("--seed", mf.seed, "random seed (default: HYPERFIT_SEED or 1)");
  mc_cmd->add_option("--threshold", mf.threshold, "acceptance ratio limit")->capture_default_str();
  mc_cmd->add_option("--bins", mf.bins, "t_c histogram bins")->capture_default_str();
  mc_cmd->add_option("--sweep", mf.sweep, "FROM:TO:STEP in percent; prints CSV");

  auto* curve_cmd = app.add_subcommand("curve", "tabulate a model curve as CSV");
  add_param_options(curve_cmd, curve_pf);
  curve_cmd->add_option("--quantity", cf.quantity, "logprice, price, rate or doubling")->capture_default_str();
  curve_cmd->add_option("--from", cf.from, "first time (date or axis units)");
  curve_cmd->add_option("--to", cf.to, "last time (date or axis units)");
  curve_cmd->add_option("--points", cf.points, "number of samples")->capture_default_str();

  auto* predict_cmd = app.add_subcommand("predict", "price index and year-over-year inflation at a date");
  add_param_options(predict_cmd, predict_pf);
  predict_cmd->add_option("--at", at, "target (date or axis units)");

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic fixture from model parameters");
  synth_cmd->add_option("--model", sf.model)->capture_default_str();
  synth_cmd->add_option("--from", sf.from, "first model epoch (t0)");
  synth_cmd->add_option("--to", sf.to, "last epoch");
  synth_cmd->add_option("--lead-from", sf.lead_from, "earlier start of a linear lead-in segment");
  synth_cmd->add_option("--kind", sf.kind, "rate or index")->capture_default_str();
  synth_cmd->add_option("--day-convention", sf.day_convention)->capture_default_str();
  synth_cmd->add_option("--year-convention", sf.year_convention)->capture_default_str();
  synth_cmd->add_option("--tc", sf.tc, "critical time (date or axis units)");
  synth_cmd->add_option("--alpha", sf.alpha)->capture_default_str();
  synth_cmd->add_option("--c0", sf.c0, "growth of ln P per period")->capture_default_str();
  synth_cmd->add_option("--p0", sf.p0)->capture_default_str();
  synth_cmd->add_option("--b2", sf.b2, "double exponential rate per period")->capture_default_str();
  synth_cmd->add_option("--label", sf.label)->capture_default_str();
  synth_cmd->add_option("--out", sf.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      if (dynamic_cast<const CLI::CallForVersion*>(&e)) {
        out << e.what() << '\n';
      } else {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
      }
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_in, fit_ff, out, err);
    if (*mc_cmd) return cmd_mc(mc_in, mc_ff, mf, out, err);
    if (*curve_cmd) return cmd_curve(curve_pf, cf, out, err);
    if (*predict_cmd) return cmd_predict(predict_pf, at, out);
    if (*synth_cmd) return cmd_synth(sf, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace hyperfit
