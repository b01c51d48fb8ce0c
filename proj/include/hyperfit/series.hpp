#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hyperfit/calendar.hpp"

namespace hyperfit {

/// Per-period inflation rates i(t_k) on a uniform calendar grid.
///
/// Invariants: epochs strictly increasing and one period apart, every rate
/// finite and greater than -1, and the first rate exactly zero so the
/// reconstructed index starts at unity.
class InflationSeries {
 public:
  InflationSeries(TimeAxis axis, std::vector<Epoch> epochs, std::vector<double> rates);

  [[nodiscard]] const TimeAxis& axis() const { return axis_; }
  [[nodiscard]] std::span<const Epoch> epochs() const { return epochs_; }
  [[nodiscard]] std::span<const double> times() const { return times_; }
  [[nodiscard]] std::span<const double> rates() const { return rates_; }
  [[nodiscard]] std::size_t size() const { return rates_.size(); }

 private:
  TimeAxis axis_;
  std::vector<Epoch> epochs_;
  std::vector<double> times_;
  std::vector<double> rates_;
};

/// Cumulated price index P(t_k) with p = ln P stored alongside.
class PriceIndexSeries {
 public:
  PriceIndexSeries(TimeAxis axis, std::vector<Epoch> epochs, std::vector<double> index);

  [[nodiscard]] const TimeAxis& axis() const { return axis_; }
  [[nodiscard]] std::span<const Epoch> epochs() const { return epochs_; }
  [[nodiscard]] std::span<const double> times() const { return times_; }
  [[nodiscard]] std::span<const double> index() const { return index_; }
  [[nodiscard]] std::span<const double> log_index() const { return log_index_; }
  [[nodiscard]] std::size_t size() const { return index_.size(); }

 private:
  TimeAxis axis_;
  std::vector<Epoch> epochs_;
  std::vector<double> times_;
  std::vector<double> index_;
  std::vector<double> log_index_;
};

struct GrowthRate {
  Epoch epoch;
  double t = 0.0;
  double r = 0.0;
};

/// P(t_n) = prod_{k<=n} (1 + i(t_k)).
PriceIndexSeries build_price_index(const InflationSeries& rates);

/// r(t_k) = p(t_{k+1}) - p(t_k); one shorter than the input.
std::vector<GrowthRate> growth_rates(const PriceIndexSeries& index);

/// Per-period rates i_k = P_k / P_{k-1} - 1 with i_0 = 0.
InflationSeries rates_from_index(const PriceIndexSeries& index);

/// Inclusive calendar window [from, to].
struct EpochWindow {
  Epoch from;
  Epoch to;
  friend bool operator==(const EpochWindow&, const EpochWindow&) = default;
};

/// Parses `FROM:TO`, e.g. `1921-05:1923-11` or `1969:1990`.
EpochWindow parse_window(std::string_view text);
std::string format_window(const EpochWindow& w);

PriceIndexSeries slice(const PriceIndexSeries& index, const EpochWindow& window);

enum class SeriesKind { rate, index };
enum class Units { fraction, percent };

struct LoadOptions {
  SeriesKind kind = SeriesKind::rate;
  Units units = Units::fraction;
  DayConvention day_convention = DayConvention::mid;
  YearConvention year_convention = YearConvention::start;
};

struct LoadedSeries {
  std::variant<InflationSeries, PriceIndexSeries> series;
  std::vector<std::string> warnings;

  /// The series as a price index, rebuilding it from rates when needed.
  [[nodiscard]] PriceIndexSeries as_index() const;
  /// The series as rates, differencing an index when needed.
  [[nodiscard]] InflationSeries as_rates() const;
};

/// Reads `date,value` CSV. Blank lines and `#` comments are skipped, a
/// header line is allowed before the first row. Errors carry line numbers.
LoadedSeries load_series(std::istream& in, const LoadOptions& options);
LoadedSeries load_series(const std::filesystem::path& path, const LoadOptions& options);

SeriesKind parse_kind(std::string_view s);
Units parse_units(std::string_view s);

}  // namespace hyperfit
