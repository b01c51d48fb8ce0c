#include "hyperfit/calendar.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "hyperfit/error.hpp"

namespace hyperfit {

namespace chr = std::chrono;

namespace {

constexpr double kDaysPerYear = 365.25;

unsigned parse_unsigned(std::string_view s, std::string_view whole) {
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("malformed date '" + std::string(whole) + "'");
  }
  return v;
}

double year_offset(YearConvention c) {
  switch (c) {
    case YearConvention::start: return 0.0;
    case YearConvention::mid: return 0.5;
    case YearConvention::end: return 1.0;
  }
  return 0.0;
}

}  // namespace

Epoch parse_epoch(std::string_view text) {
  Epoch e;
  const auto first = text.find('-');
  if (first == std::string_view::npos) {
    if (text.size() != 4) throw InputError("malformed date '" + std::string(text) + "'");
    e.year = static_cast<int>(parse_unsigned(text, text));
    return e;
  }
  if (first != 4) throw InputError("malformed date '" + std::string(text) + "'");
  e.year = static_cast<int>(parse_unsigned(text.substr(0, 4), text));
  const auto rest = text.substr(5);
  const auto second = rest.find('-');
  e.month = parse_unsigned(rest.substr(0, second), text);
  if (e.month < 1 || e.month > 12) throw InputError("month out of range in '" + std::string(text) + "'");
  if (second != std::string_view::npos) {
    e.day = parse_unsigned(rest.substr(second + 1), text);
    const chr::year_month_day ymd{chr::year{e.year}, chr::month{e.month}, chr::day{e.day}};
    if (!ymd.ok() || e.day == 0) throw InputError("invalid day in '" + std::string(text) + "'");
  }
  return e;
}

std::string format_epoch(const Epoch& e) {
  char buf[32];
  if (e.month == 0) {
    std::snprintf(buf, sizeof buf, "%04d", e.year);
  } else if (e.day == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u", e.year, e.month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", e.year, e.month, e.day);
  }
  return buf;
}

std::string_view to_string(DayConvention c) { return c == DayConvention::mid ? "mid" : "end"; }

std::string_view to_string(YearConvention c) {
  switch (c) {
    case YearConvention::start: return "start";
    case YearConvention::mid: return "mid";
    case YearConvention::end: return "end";
  }
  return "start";
}

std::string_view to_string(Resolution r) { return r == Resolution::yearly ? "yearly" : "monthly"; }

DayConvention parse_day_convention(std::string_view s) {
  if (s == "mid") return DayConvention::mid;
  if (s == "end") return DayConvention::end;
  throw InputError("unknown day convention '" + std::string(s) + "'");
}

YearConvention parse_year_convention(std::string_view s) {
  if (s == "start") return YearConvention::start;
  if (s == "mid") return YearConvention::mid;
  if (s == "end") return YearConvention::end;
  throw InputError("unknown year convention '" + std::string(s) + "'");
}

Resolution parse_resolution(std::string_view s) {
  if (s == "yearly") return Resolution::yearly;
  if (s == "monthly") return Resolution::monthly;
  throw InputError("unknown resolution '" + std::string(s) + "'");
}

TimeAxis TimeAxis::yearly(YearConvention convention) {
  TimeAxis a;
  a.resolution_ = Resolution::yearly;
  a.year_convention_ = convention;
  return a;
}

TimeAxis TimeAxis::monthly(chr::sys_days origin, DayConvention convention) {
  TimeAxis a;
  a.resolution_ = Resolution::monthly;
  a.day_convention_ = convention;
  a.origin_ = origin;
  return a;
}

TimeAxis TimeAxis::monthly_from(const Epoch& first, DayConvention convention) {
  TimeAxis a = monthly({}, convention);
  a.origin_ = a.resolve_day(first);
  return a;
}

double TimeAxis::period() const {
  return resolution_ == Resolution::yearly ? 1.0 : kDaysPerYear / 12.0;
}

double TimeAxis::year_length() const {
  return resolution_ == Resolution::yearly ? 1.0 : kDaysPerYear;
}

std::string_view TimeAxis::unit_name() const {
  return resolution_ == Resolution::yearly ? "year" : "day";
}

chr::sys_days TimeAxis::resolve_day(const Epoch& e) const {
  if (e.month == 0) throw InputError("yearly epoch " + format_epoch(e) + " on a monthly axis");
  const chr::year y{e.year};
  const chr::month m{e.month};
  if (e.day != 0) return chr::sys_days{y / m / chr::day{e.day}};
  if (day_convention_ == DayConvention::mid) return chr::sys_days{y / m / chr::day{15}};
  return chr::sys_days{y / m / chr::last};
}

double TimeAxis::to_time(const Epoch& e) const {
  if (resolution_ == Resolution::yearly) {
    if (e.month != 0) throw InputError("monthly epoch " + format_epoch(e) + " on a yearly axis");
    return static_cast<double>(e.year) + year_offset(year_convention_);
  }
  return static_cast<double>((resolve_day(e) - origin_).count());
}

Epoch TimeAxis::to_epoch(double t) const {
  Epoch e;
  if (resolution_ == Resolution::yearly) {
    e.year = static_cast<int>(std::floor(t - year_offset(year_convention_) + 1e-9));
    return e;
  }
  const chr::sys_days d = origin_ + chr::days{static_cast<long>(std::floor(t + 0.5))};
  const chr::year_month_day ymd{d};
  e.year = static_cast<int>(ymd.year());
  e.month = static_cast<unsigned>(ymd.month());
  return e;
}

std::string TimeAxis::format_time(double t) const {
  char buf[48];
  if (resolution_ == Resolution::yearly) {
    std::snprintf(buf, sizeof buf, "%.2f", t);
    return buf;
  }
  const chr::sys_days d = origin_ + chr::days{static_cast<long>(std::floor(t + 0.5))};
  const chr::year_month_day ymd{d};
  std::snprintf(buf, sizeof buf, "%04d:%02u:%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

double TimeAxis::parse_time(std::string_view text) const {
  if (text.find('-', 1) != std::string_view::npos) return to_time(parse_epoch(text));
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("cannot read time '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace hyperfit
