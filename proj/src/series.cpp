#include "hyperfit/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "hyperfit/error.hpp"

namespace hyperfit {

namespace {

// Day gaps allowed between consecutive explicit-day monthly samples.
constexpr long kMinMonthGapDays = 25;
constexpr long kMaxMonthGapDays = 36;

void check_grid(const TimeAxis& axis, std::span<const Epoch> epochs) {
  if (epochs.empty()) throw InputError("empty series");
  for (std::size_t k = 0; k < epochs.size(); ++k) {
    const Epoch& e = epochs[k];
    if (e.resolution() != axis.resolution()) {
      throw InputError("epoch " + format_epoch(e) + " does not match the " +
                       std::string(to_string(axis.resolution())) + " resolution of the series");
    }
    if (k == 0) continue;
    const Epoch& prev = epochs[k - 1];
    if (axis.resolution() == Resolution::yearly) {
      if (e.year != prev.year + 1) {
        throw InputError("non-uniform spacing between " + format_epoch(prev) + " and " + format_epoch(e));
      }
    } else {
      if (e.month_index() != prev.month_index() + 1) {
        throw InputError("non-uniform spacing between " + format_epoch(prev) + " and " + format_epoch(e));
      }
      const long gap = (axis.resolve_day(e) - axis.resolve_day(prev)).count();
      if (gap < kMinMonthGapDays || gap > kMaxMonthGapDays) {
        throw InputError("irregular day gap between " + format_epoch(prev) + " and " + format_epoch(e));
      }
    }
  }
}

std::vector<double> times_of(const TimeAxis& axis, std::span<const Epoch> epochs) {
  std::vector<double> t;
  t.reserve(epochs.size());
  for (const Epoch& e : epochs) t.push_back(axis.to_time(e));
  return t;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

InflationSeries::InflationSeries(TimeAxis axis, std::vector<Epoch> epochs, std::vector<double> rates)
    : axis_(axis), epochs_(std::move(epochs)), rates_(std::move(rates)) {
  if (epochs_.size() != rates_.size()) throw InputError("epoch/rate length mismatch");
  check_grid(axis_, epochs_);
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    if (!std::isfinite(rates_[k]) || rates_[k] <= -1.0) {
      throw InputError("rate at " + format_epoch(epochs_[k]) + " is " + std::to_string(rates_[k]) +
                       " (must be finite and greater than -1)");
    }
  }
  if (rates_.front() != 0.0) {
    throw InputError("first rate at " + format_epoch(epochs_.front()) + " must be zero");
  }
  times_ = times_of(axis_, epochs_);
}

PriceIndexSeries::PriceIndexSeries(TimeAxis axis, std::vector<Epoch> epochs, std::vector<double> index)
    : axis_(axis), epochs_(std::move(epochs)), index_(std::move(index)) {
  if (epochs_.size() != index_.size()) throw InputError("epoch/index length mismatch");
  check_grid(axis_, epochs_);
  log_index_.reserve(index_.size());
  for (std::size_t k = 0; k < index_.size(); ++k) {
    if (!(index_[k] > 0.0) || !std::isfinite(index_[k])) {
      throw InputError("price index at " + format_epoch(epochs_[k]) + " must be positive and finite");
    }
    log_index_.push_back(std::log(index_[k]));
  }
  times_ = times_of(axis_, epochs_);
}

PriceIndexSeries build_price_index(const InflationSeries& rates) {
  std::vector<double> P;
  P.reserve(rates.size());
  double acc = 1.0;
  for (double i : rates.rates()) {
    acc *= 1.0 + i;
    P.push_back(acc);
  }
  return PriceIndexSeries(rates.axis(), {rates.epochs().begin(), rates.epochs().end()}, std::move(P));
}

std::vector<GrowthRate> growth_rates(const PriceIndexSeries& index) {
  if (index.size() < 2) throw InputError("growth rates need at least two samples");
  std::vector<GrowthRate> out;
  out.reserve(index.size() - 1);
  const auto p = index.log_index();
  for (std::size_t k = 0; k + 1 < index.size(); ++k) {
    out.push_back({index.epochs()[k], index.times()[k], p[k + 1] - p[k]});
  }
  return out;
}

InflationSeries rates_from_index(const PriceIndexSeries& index) {
  std::vector<double> i(index.size(), 0.0);
  const auto p = index.log_index();
  for (std::size_t k = 1; k < index.size(); ++k) i[k] = std::expm1(p[k] - p[k - 1]);
  return InflationSeries(index.axis(), {index.epochs().begin(), index.epochs().end()}, std::move(i));
}

EpochWindow parse_window(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InputError("window must look like FROM:TO");
  EpochWindow w{parse_epoch(trim(text.substr(0, colon))), parse_epoch(trim(text.substr(colon + 1)))};
  if (w.to < w.from) throw InputError("window end precedes its start");
  return w;
}

std::string format_window(const EpochWindow& w) { return format_epoch(w.from) + ":" + format_epoch(w.to); }

PriceIndexSeries slice(const PriceIndexSeries& index, const EpochWindow& window) {
  std::vector<Epoch> epochs;
  std::vector<double> values;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const Epoch& e = index.epochs()[k];
    // Compare at the series resolution: an explicit day never excludes its month.
    Epoch key = e;
    key.day = 0;
    if (key < window.from || window.to < key) continue;
    epochs.push_back(e);
    values.push_back(index.index()[k]);
  }
  if (epochs.empty()) throw InputError("window " + format_window(window) + " selects no samples");
  return PriceIndexSeries(index.axis(), std::move(epochs), std::move(values));
}

PriceIndexSeries LoadedSeries::as_index() const {
  if (const auto* idx = std::get_if<PriceIndexSeries>(&series)) return *idx;
  return build_price_index(std::get<InflationSeries>(series));
}

InflationSeries LoadedSeries::as_rates() const {
  if (const auto* r = std::get_if<InflationSeries>(&series)) return *r;
  return rates_from_index(std::get<PriceIndexSeries>(series));
}

SeriesKind parse_kind(std::string_view s) {
  if (s == "rate") return SeriesKind::rate;
  if (s == "index") return SeriesKind::index;
  throw InputError("unknown series kind '" + std::string(s) + "'");
}

Units parse_units(std::string_view s) {
  if (s == "fraction") return Units::fraction;
  if (s == "percent") return Units::percent;
  throw InputError("unknown units '" + std::string(s) + "'");
}

LoadedSeries load_series(std::istream& in, const LoadOptions& options) {
  std::vector<Epoch> epochs;
  std::vector<double> values;
  std::vector<std::size_t> lines;
  std::vector<std::string> warnings;
  std::string raw;
  std::size_t line = 0;
  bool seen_row = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw InputError(at_line(line, "expected 'date,value'"));
    const std::string_view date = trim(text.substr(0, comma));
    const std::string_view value = trim(text.substr(comma + 1));
    if (value.find(',') != std::string_view::npos) throw InputError(at_line(line, "too many columns"));

    Epoch e;
    try {
      e = parse_epoch(date);
    } catch (const InputError& err) {
      if (!seen_row && epochs.empty()) {
        seen_row = true;  // header
        continue;
      }
      throw InputError(at_line(line, err.what()));
    }
    seen_row = true;

    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw InputError(at_line(line, "cannot read value '" + std::string(value) + "'"));
    }
    if (!epochs.empty()) {
      if (e.resolution() != epochs.front().resolution()) {
        throw InputError(at_line(line, "mixed yearly and monthly dates"));
      }
      if (e == epochs.back()) throw InputError(at_line(line, "duplicate date " + format_epoch(e)));
      if (e < epochs.back()) throw InputError(at_line(line, "date " + format_epoch(e) + " out of order"));
    }
    epochs.push_back(e);
    values.push_back(v);
    lines.push_back(line);
  }
  if (epochs.empty()) throw InputError("no data rows");

  const TimeAxis axis = epochs.front().resolution() == Resolution::yearly
                            ? TimeAxis::yearly(options.year_convention)
                            : TimeAxis::monthly_from(epochs.front(), options.day_convention);

  // Re-run the grid check here so spacing errors can name a line.
  for (std::size_t k = 1; k < epochs.size(); ++k) {
    try {
      check_grid(axis, std::span<const Epoch>(epochs).subspan(k - 1, 2));
    } catch (const InputError& err) {
      throw InputError(at_line(lines[k], err.what()));
    }
  }

  if (options.kind == SeriesKind::rate) {
    if (options.units == Units::percent) {
      for (double& v : values) v /= 100.0;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (values[k] <= -1.0) {
        throw InputError(at_line(lines[k], "rate at " + format_epoch(epochs[k]) + " is not greater than -1"));
      }
    }
    if (values.front() != 0.0) {
      warnings.push_back("first rate at " + format_epoch(epochs.front()) + " reset to zero (index normalised to 1)");
      values.front() = 0.0;
    }
    return {InflationSeries(axis, std::move(epochs), std::move(values)), std::move(warnings)};
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) {
      throw InputError(at_line(lines[k], "price index at " + format_epoch(epochs[k]) + " must be positive"));
    }
  }
  return {PriceIndexSeries(axis, std::move(epochs), std::move(values)), std::move(warnings)};
}

LoadedSeries load_series(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return load_series(in, options);
  } catch (const InputError& err) {
    throw InputError(path.string() + ": " + err.what());
  }
}

}  // namespace hyperfit
