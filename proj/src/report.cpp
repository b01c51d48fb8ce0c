#include "hyperfit/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "hyperfit/error.hpp"

namespace hyperfit {

namespace {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void put(const std::string& key, const std::string& value) { out_ << key << " = " << value << '\n'; }
  void num(const std::string& key, double v) { put(key, format_double(v)); }
  void integer(const std::string& key, long long v) { put(key, std::to_string(v)); }
  void flag(const std::string& key, bool v) { put(key, v ? "true" : "false"); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  [[nodiscard]] bool has(const std::string& key) const { return kv_.count(key) != 0; }
  [[nodiscard]] const std::string& str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw InputError("report is missing key '" + key + "'");
    return it->second;
  }
  [[nodiscard]] double num(const std::string& key) const { return parse_double(str(key)); }
  [[nodiscard]] long long integer(const std::string& key) const {
    const std::string& s = str(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw InputError("bad integer for '" + key + "'");
    return v;
  }
  [[nodiscard]] bool flag(const std::string& key) const {
    const std::string& s = str(key);
    if (s == "true") return true;
    if (s == "false") return false;
    throw InputError("bad boolean for '" + key + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
};

std::string format_date(std::chrono::sys_days d) {
  const std::chrono::year_month_day ymd{d};
  return format_epoch(Epoch{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                            static_cast<unsigned>(ymd.day())});
}

void write_stats(Writer& w, const std::string& name, const ParamStats& s) {
  w.num("mc." + name + ".direct", s.direct);
  w.num("mc." + name + ".mean", s.mean);
  w.num("mc." + name + ".std", s.std);
  w.num("mc." + name + ".ratio", s.ratio);
  w.flag("mc." + name + ".accepted", s.accepted);
}

ParamStats read_stats(const Reader& r, const std::string& name) {
  ParamStats s;
  s.direct = r.num("mc." + name + ".direct");
  s.mean = r.num("mc." + name + ".mean");
  s.std = r.num("mc." + name + ".std");
  s.ratio = r.num("mc." + name + ".ratio");
  s.accepted = r.flag("mc." + name + ".accepted");
  return s;
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("cannot read number '" + std::string(text) + "'");
  }
  return v;
}

DerivedQuantities derive(const AnalysisReport& report) {
  DerivedQuantities d;
  const double period = report.axis.period();
  std::visit(
      [&](const auto& p) {
        d.c0_per_period = p.c0 * period;
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SingularityParams>) {
          d.gamma = alpha_to_gamma(p.alpha);
          const ABCoefficients ab = ab_coefficients(p);
          d.a = ab.a;
          d.b = ab.b;
          d.tc_date = report.axis.format_time(p.tc);
        }
      },
      report.params);
  return d;
}

AnalysisReport make_report(const FitResult& fit, const TimeAxis& axis, std::string dataset,
                           std::optional<EpochWindow> window) {
  AnalysisReport r;
#ifdef HYPERFIT_VERSION
  r.version = HYPERFIT_VERSION;
#endif
  r.dataset = std::move(dataset);
  r.window = window;
  r.axis = axis;
  r.model = fit.model;
  r.params = fit.params;
  r.chi = fit.chi;
  r.chi_divisor = fit.chi_divisor;
  r.n_points = fit.residuals.size();
  r.n_params = fit.n_params;
  r.converged = fit.converged;
  r.iterations = fit.iterations;
  r.warnings = fit.warnings;
  return r;
}

void write_report(std::ostream& out, const AnalysisReport& report) {
  Writer w(out);
  w.put("format", kReportFormat);
  w.put("version", report.version);
  w.put("dataset", report.dataset);
  w.put("window", report.window ? format_window(*report.window) : "all");
  w.put("resolution", std::string(to_string(report.axis.resolution())));
  w.put("day_convention", std::string(to_string(report.axis.day_convention())));
  w.put("year_convention", std::string(to_string(report.axis.year_convention())));
  w.put("origin", report.axis.resolution() == Resolution::monthly ? format_date(report.axis.origin()) : "none");
  w.put("time_unit", std::string(report.axis.unit_name()));
  w.num("period", report.axis.period());
  w.put("model", std::string(to_string(report.model)));

  const DerivedQuantities d = derive(report);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        w.num("t0", p.t0);
        w.put("t0_date", report.axis.format_time(p.t0));
        if constexpr (std::is_same_v<P, SingularityParams>) {
          w.num("tc", p.tc);
          w.put("tc_date", *d.tc_date);
          w.num("alpha", p.alpha);
        }
        w.num("c0", p.c0);
        w.num("c0_per_period", d.c0_per_period);
        w.num("p0", p.p0);
        if constexpr (std::is_same_v<P, DoubleExpParams>) w.num("b2", p.b2);
      },
      report.params);
  if (d.gamma) w.num("gamma", *d.gamma);
  if (d.a) w.num("A", *d.a);
  if (d.b) w.num("B", *d.b);

  w.num("chi", report.chi);
  w.put("chi_divisor", std::string(to_string(report.chi_divisor)));
  w.put("residual_scale", "ln");
  w.integer("n_points", static_cast<long long>(report.n_points));
  w.integer("n_params", static_cast<long long>(report.n_params));
  w.flag("converged", report.converged);
  w.integer("iterations", report.iterations);
  w.integer("warnings", static_cast<long long>(report.warnings.size()));
  for (std::size_t i = 0; i < report.warnings.size(); ++i) {
    w.put("warning." + std::to_string(i), report.warnings[i]);
  }

  w.flag("mc", report.mc.has_value());
  if (report.mc) {
    const MCReport& mc = *report.mc;
    w.num("mc.rel_error", mc.rel_error);
    w.integer("mc.generations", static_cast<long long>(mc.generations));
    w.put("mc.seed", std::to_string(mc.seed));
    w.num("mc.threshold", mc.threshold);
    w.num("mc.t0", mc.t0);
    write_stats(w, "tc", mc.tc);
    write_stats(w, "alpha", mc.alpha);
    write_stats(w, "c0", mc.c0);
    write_stats(w, "p0", mc.p0);
    write_stats(w, "gamma", mc.gamma);
    w.num("mc.tc_uncertainty", mc.tc.std);
    w.flag("mc.accepted", mc.accepted);
    w.flag("mc.reliable", mc.reliable);
    w.integer("mc.non_converged", static_cast<long long>(mc.non_converged));
    w.integer("mc.truncated_draws", static_cast<long long>(mc.truncated_draws));
    w.num("mc.tc_skewness", mc.tc_skewness);
    w.num("mc.tc_excess_kurtosis", mc.tc_excess_kurtosis);
    w.flag("mc.tc_gaussian", mc.tc_gaussian);
    w.num("mc.tc_histogram.lo", mc.tc_histogram.lo);
    w.num("mc.tc_histogram.hi", mc.tc_histogram.hi);
    std::string counts;
    for (std::size_t i = 0; i < mc.tc_histogram.counts.size(); ++i) {
      if (i) counts += ',';
      counts += std::to_string(mc.tc_histogram.counts[i]);
    }
    w.put("mc.tc_histogram.counts", counts);
  }
}

std::string to_text(const AnalysisReport& report) {
  std::ostringstream os;
  write_report(os, report);
  return os.str();
}

AnalysisReport read_report(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim_copy(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("report line " + std::to_string(n) + ": expected 'key = value'");
    kv[trim_copy(std::string_view(t).substr(0, eq))] = trim_copy(std::string_view(t).substr(eq + 1));
  }
  const Reader r(std::move(kv));
  if (r.str("format") != kReportFormat) throw InputError("unsupported report format '" + r.str("format") + "'");

  AnalysisReport rep;
  rep.version = r.str("version");
  rep.dataset = r.str("dataset");
  if (r.str("window") != "all") rep.window = parse_window(r.str("window"));
  const Resolution res = parse_resolution(r.str("resolution"));
  const DayConvention dc = parse_day_convention(r.str("day_convention"));
  const YearConvention yc = parse_year_convention(r.str("year_convention"));
  if (res == Resolution::yearly) {
    rep.axis = TimeAxis::yearly(yc);
  } else {
    const Epoch o = parse_epoch(r.str("origin"));
    if (o.day == 0) throw InputError("report origin must be a full date");
    rep.axis = TimeAxis::monthly(
        std::chrono::sys_days{std::chrono::year{o.year} / std::chrono::month{o.month} / std::chrono::day{o.day}},
        dc);
  }
  rep.model = parse_model(r.str("model"));
  const double t0 = r.num("t0");
  switch (rep.model) {
    case ModelKind::linear: rep.params = LinearParams{r.num("p0"), r.num("c0"), t0}; break;
    case ModelKind::double_exp: rep.params = DoubleExpParams{r.num("p0"), r.num("c0"), r.num("b2"), t0}; break;
    case ModelKind::singularity:
      rep.params = SingularityParams{r.num("tc"), r.num("alpha"), r.num("c0"), r.num("p0"), t0};
      break;
  }
  rep.chi = r.num("chi");
  rep.chi_divisor = parse_chi_divisor(r.str("chi_divisor"));
  rep.n_points = static_cast<std::size_t>(r.integer("n_points"));
  rep.n_params = static_cast<std::size_t>(r.integer("n_params"));
  rep.converged = r.flag("converged");
  rep.iterations = static_cast<int>(r.integer("iterations"));
  const auto n_warn = static_cast<std::size_t>(r.integer("warnings"));
  for (std::size_t i = 0; i < n_warn; ++i) rep.warnings.push_back(r.str("warning." + std::to_string(i)));

  if (r.flag("mc")) {
    MCReport mc;
    mc.rel_error = r.num("mc.rel_error");
    mc.generations = static_cast<std::size_t>(r.integer("mc.generations"));
    mc.seed = std::stoull(r.str("mc.seed"));
    mc.threshold = r.num("mc.threshold");
    mc.t0 = r.num("mc.t0");
    mc.tc = read_stats(r, "tc");
    mc.alpha = read_stats(r, "alpha");
    mc.c0 = read_stats(r, "c0");
    mc.p0 = read_stats(r, "p0");
    mc.gamma = read_stats(r, "gamma");
    mc.accepted = r.flag("mc.accepted");
    mc.reliable = r.flag("mc.reliable");
    mc.non_converged = static_cast<std::size_t>(r.integer("mc.non_converged"));
    mc.truncated_draws = static_cast<std::size_t>(r.integer("mc.truncated_draws"));
    mc.tc_skewness = r.num("mc.tc_skewness");
    mc.tc_excess_kurtosis = r.num("mc.tc_excess_kurtosis");
    mc.tc_gaussian = r.flag("mc.tc_gaussian");
    mc.tc_histogram.lo = r.num("mc.tc_histogram.lo");
    mc.tc_histogram.hi = r.num("mc.tc_histogram.hi");
    std::istringstream counts(r.str("mc.tc_histogram.counts"));
    std::string item;
    while (std::getline(counts, item, ',')) {
      if (!item.empty()) mc.tc_histogram.counts.push_back(std::stoull(item));
    }
    rep.mc = mc;
  }
  return rep;
}

AnalysisReport parse_report(const std::string& text) {
  std::istringstream in(text);
  return read_report(in);
}

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
  return a.version == b.version && a.dataset == b.dataset && a.window == b.window && a.axis == b.axis &&
         a.model == b.model && a.params == b.params && a.chi == b.chi && a.chi_divisor == b.chi_divisor &&
         a.n_points == b.n_points && a.n_params == b.n_params && a.converged == b.converged &&
         a.iterations == b.iterations && a.mc == b.mc && a.warnings == b.warnings;
}

}  // namespace hyperfit
