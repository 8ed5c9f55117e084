#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tapered/luka.hpp"

namespace tapered {

struct ErrorStatistics {
  double max_abs_error = 0.0;
  double rms_error = 0.0;
  double std_deviation = 0.0;  ///< population standard deviation
  std::size_t samples = 0;
};

/// Max, RMS and population standard deviation of a sample of absolute errors.
ErrorStatistics error_statistics(std::span<const double> errors);

/// Accuracy of one (format, norm) run against the binary64 reference.
/// The headline statistics pool the u and v errors of pixels that are Ok in
/// both fields; per-component statistics are kept alongside.
struct ErrorReport {
  std::string format;
  int norm = 0;
  double max_abs_error = 0.0;
  double rms_error = 0.0;
  double std_deviation = 0.0;
  ErrorStatistics u;
  ErrorStatistics v;
  std::size_t compared_pixels = 0;
  std::size_t exception_count = 0;
  std::size_t singular_count = 0;
};

/// Per-pixel absolute error of one flow component. Pixels that are not
/// compared hold 0; `exception` marks pixels whose test status is Exception.
struct HeatMap {
  Field<double> error;
  Field<bool> exception;
};

struct Comparison {
  ErrorReport report;
  HeatMap u;
  HeatMap v;
};

Comparison compare(const FlowField<double>& test, const FlowField<double>& reference, std::string format = {},
                   int norm = 0);

struct SweepResult {
  std::vector<ErrorReport> reports;  ///< in the order of the requested norms
  std::optional<int> best_norm;      ///< smallest max error among exception-free norms
};

/// Smallest max_abs_error among reports without exceptions; ties go to the smaller norm.
std::optional<int> best_norm(std::span<const ErrorReport> reports);

template <ScalarFormat F>
SweepResult sweep(const Frame& f1, const Frame& f2, const F& fmt, std::span<const int> norms,
                  const FlowOptions& opts = {})
{
  if (norms.empty()) throw std::invalid_argument("sweep needs at least one norm");
  SweepResult result;
  result.reports.reserve(norms.size());
  for (int norm : norms) {
    const auto ref = flow(f1, f2, norm, opts, ReferenceFormat{});
    const auto test = to_reference_field(flow(f1, f2, norm, opts, fmt), fmt);
    result.reports.push_back(compare(test, ref, fmt.name(), norm).report);
  }
  result.best_norm = best_norm(result.reports);
  return result;
}

inline SweepResult sweep_any(const Frame& f1, const Frame& f2, const AnyFormat& fmt, std::span<const int> norms,
                             const FlowOptions& opts = {})
{
  return std::visit([&](const auto& f) { return sweep(f1, f2, f, norms, opts); }, fmt);
}

/// Representable values of a 16-bit format, binned by binade [2^b, 2^(b+1)).
struct BinadeCensus {
  std::string format;
  std::map<int, std::size_t> positive_per_binade;  ///< positive values per binade
  std::size_t finite_nonzero_patterns = 0;         ///< both signs
  double min_positive = 0.0;
  double max_finite = 0.0;
};

/// Enumerates every pattern of a posit with n <= 16.
BinadeCensus representable_census(PositConfig cfg);
/// Enumerates every binary16 pattern.
BinadeCensus representable_census_binary16();

struct HistogramRow {
  int binade = 0;
  std::size_t data = 0;
  std::vector<std::size_t> representable;  ///< one entry per census, same order
};

struct HistogramOverlap {
  std::vector<std::string> formats;
  std::vector<HistogramRow> rows;  ///< ascending binade
  std::size_t zero_count = 0;
  std::size_t total_values = 0;
  /// Fraction of nonzero data values within each format's [min_positive, max_finite].
  std::vector<double> coverage;
};

/// Joint table over every binade touched by the data or any census. Empty
/// data yields an empty table.
HistogramOverlap histogram_overlap(std::span<const double> unique_values, std::span<const BinadeCensus> censuses);

/// Binade index of a finite nonzero value.
int binade_of(double x);

}  // namespace tapered
