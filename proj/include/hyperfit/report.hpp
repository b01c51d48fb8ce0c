#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperfit/calendar.hpp"
#include "hyperfit/fitting.hpp"
#include "hyperfit/montecarlo.hpp"
#include "hyperfit/series.hpp"

namespace hyperfit {

inline constexpr const char* kReportFormat = "hyperfit-report/1";

/// Everything needed to reproduce and present one analysis.
struct AnalysisReport {
  std::string version;
  std::string dataset;
  std::optional<EpochWindow> window;
  TimeAxis axis;
  ModelKind model = ModelKind::singularity;
  ModelParams params;
  double chi = 0.0;
  ChiDivisor chi_divisor = ChiDivisor::n;
  std::size_t n_points = 0;
  std::size_t n_params = 0;
  bool converged = false;
  int iterations = 0;
  std::optional<MCReport> mc;
  std::vector<std::string> warnings;
};

/// Values shown next to the parameters; always recomputed from them.
struct DerivedQuantities {
  double c0_per_period = 0.0;
  std::optional<double> gamma;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<std::string> tc_date;
};

DerivedQuantities derive(const AnalysisReport& report);

AnalysisReport make_report(const FitResult& fit, const TimeAxis& axis, std::string dataset,
                           std::optional<EpochWindow> window);

/// Flat `key = value` text, one entry per line, doubles in shortest
/// round-trip form.
void write_report(std::ostream& out, const AnalysisReport& report);
std::string to_text(const AnalysisReport& report);

/// Throws InputError on unknown format versions or missing keys.
AnalysisReport read_report(std::istream& in);
AnalysisReport parse_report(const std::string& text);

bool operator==(const AnalysisReport& a, const AnalysisReport& b);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace hyperfit
