#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace hyperfit {

enum class Resolution { yearly, monthly };

/// Where a month-resolution sample sits inside its month.
enum class DayConvention { mid, end };

/// Where a year-resolution sample sits inside its year.
enum class YearConvention { start, mid, end };

/// A calendar stamp as it appears in an input file.
///
/// Yearly epochs carry only `year`. Monthly epochs carry `year` and `month`;
/// `day` is zero unless the file gave an explicit day, in which case it
/// overrides the day convention of the axis.
struct Epoch {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;

  [[nodiscard]] Resolution resolution() const {
    return month == 0 ? Resolution::yearly : Resolution::monthly;
  }
  [[nodiscard]] int month_index() const { return year * 12 + static_cast<int>(month) - 1; }

  friend auto operator<=>(const Epoch&, const Epoch&) = default;
};

/// Parses `YYYY`, `YYYY-MM` or `YYYY-MM-DD`. Throws InputError.
Epoch parse_epoch(std::string_view text);
std::string format_epoch(const Epoch& e);

std::string_view to_string(DayConvention c);
std::string_view to_string(YearConvention c);
std::string_view to_string(Resolution r);
DayConvention parse_day_convention(std::string_view s);
YearConvention parse_year_convention(std::string_view s);
Resolution parse_resolution(std::string_view s);

/// Maps epochs onto the continuous time coordinate used by every model.
///
/// Yearly axes use the calendar year as a real number (plus the year
/// convention offset). Monthly axes count days from an origin date, so t_c
/// comes back with day precision.
class TimeAxis {
 public:
  static TimeAxis yearly(YearConvention convention = YearConvention::start);
  static TimeAxis monthly(std::chrono::sys_days origin, DayConvention convention);
  /// Monthly axis whose origin is the resolved date of `first`.
  static TimeAxis monthly_from(const Epoch& first, DayConvention convention);

  [[nodiscard]] Resolution resolution() const { return resolution_; }
  [[nodiscard]] DayConvention day_convention() const { return day_convention_; }
  [[nodiscard]] YearConvention year_convention() const { return year_convention_; }
  [[nodiscard]] std::chrono::sys_days origin() const { return origin_; }

  /// Nominal sampling period in axis units: 1 year, or 365.25/12 days.
  [[nodiscard]] double period() const;
  /// One calendar year in axis units.
  [[nodiscard]] double year_length() const;
  [[nodiscard]] std::string_view unit_name() const;

  [[nodiscard]] std::chrono::sys_days resolve_day(const Epoch& e) const;
  [[nodiscard]] double to_time(const Epoch& e) const;
  /// Inverse of to_time at the axis resolution (day-of-month is dropped).
  [[nodiscard]] Epoch to_epoch(double t) const;
  /// Presentation form: `1994:03:10` on monthly axes, `1991.29` on yearly ones.
  [[nodiscard]] std::string format_time(double t) const;
  /// Accepts either a calendar stamp or a bare number already in axis units.
  [[nodiscard]] double parse_time(std::string_view text) const;

  friend bool operator==(const TimeAxis&, const TimeAxis&) = default;

 private:
  Resolution resolution_ = Resolution::yearly;
  DayConvention day_convention_ = DayConvention::mid;
  YearConvention year_convention_ = YearConvention::start;
  std::chrono::sys_days origin_{};
};

}  // namespace hyperfit
