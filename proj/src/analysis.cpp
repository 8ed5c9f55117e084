#include "tapered/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tapered/binary16.hpp"

namespace tapered {

ErrorStatistics error_statistics(std::span<const double> errors)
{
  ErrorStatistics s;
  s.samples = errors.size();
  if (errors.empty()) return s;
  // Welford for the spread, plain sum of squares for the RMS.
  double mean = 0.0;
  double m2 = 0.0;
  double sum_sq = 0.0;
  std::size_t k = 0;
  for (double e : errors) {
    ++k;
    const double delta = e - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (e - mean);
    sum_sq += e * e;
    s.max_abs_error = std::max(s.max_abs_error, e);
  }
  const auto n = static_cast<double>(errors.size());
  s.rms_error = std::sqrt(sum_sq / n);
  s.std_deviation = std::sqrt(std::max(0.0, m2 / n));
  return s;
}

Comparison compare(const FlowField<double>& test, const FlowField<double>& reference, std::string format, int norm)
{
  if (test.width() != reference.width() || test.height() != reference.height()) {
    throw std::invalid_argument("flow fields differ in size");
  }
  const int w = test.width();
  const int h = test.height();
  Comparison c;
  c.u = {Field<double>::Zero(h, w), Field<bool>::Constant(h, w, false)};
  c.v = {Field<double>::Zero(h, w), Field<bool>::Constant(h, w, false)};

  std::vector<double> eu, ev;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const FlowStatus st = test.status(y, x);
      if (st == FlowStatus::Exception) {
        ++c.report.exception_count;
        c.u.exception(y, x) = true;
        c.v.exception(y, x) = true;
        continue;
      }
      if (st == FlowStatus::Singular) ++c.report.singular_count;
      if (st != FlowStatus::Ok || reference.status(y, x) != FlowStatus::Ok) continue;
      const double du = std::fabs(test.u(y, x) - reference.u(y, x));
      const double dv = std::fabs(test.v(y, x) - reference.v(y, x));
      c.u.error(y, x) = du;
      c.v.error(y, x) = dv;
      eu.push_back(du);
      ev.push_back(dv);
    }
  }
  c.report.format = std::move(format);
  c.report.norm = norm;
  c.report.compared_pixels = eu.size();
  c.report.u = error_statistics(eu);
  c.report.v = error_statistics(ev);
  std::vector<double> pooled = std::move(eu);
  pooled.insert(pooled.end(), ev.begin(), ev.end());
  const auto all = error_statistics(pooled);
  c.report.max_abs_error = all.max_abs_error;
  c.report.rms_error = all.rms_error;
  c.report.std_deviation = all.std_deviation;
  return c;
}

std::optional<int> best_norm(std::span<const ErrorReport> reports)
{
  const ErrorReport* best = nullptr;
  for (const auto& r : reports) {
    if (r.exception_count != 0) continue;
    if (best == nullptr || r.max_abs_error < best->max_abs_error ||
        (r.max_abs_error == best->max_abs_error && r.norm < best->norm)) {
      best = &r;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->norm;
}

int binade_of(double x)
{
  if (x == 0.0 || !std::isfinite(x)) throw std::invalid_argument("binade of zero or non-finite value");
  return std::ilogb(x);
}

BinadeCensus representable_census(PositConfig cfg)
{
  if (cfg.n() > 16) throw std::invalid_argument("census supports posits up to 16 bits");
  BinadeCensus c;
  c.format = "posit" + std::to_string(cfg.n()) + "," + std::to_string(cfg.es());
  const std::uint32_t patterns = std::uint32_t{1} << cfg.n();
  for (std::uint32_t bits = 0; bits < patterns; ++bits) {
    const auto p = PositValue::from_bits(bits, cfg);
    const auto d = decode(p);
    if (d.cls != PositClass::Real) continue;
    ++c.finite_nonzero_patterns;
    if (d.sign > 0) ++c.positive_per_binade[d.scale];
  }
  c.min_positive = to_double(PositValue::minpos(cfg));
  c.max_finite = to_double(PositValue::maxpos(cfg));
  return c;
}

BinadeCensus representable_census_binary16()
{
  BinadeCensus c;
  c.format = "float16";
  for (std::uint32_t bits = 0; bits <= 0xFFFF; ++bits) {
    const auto v = Binary16::from_bits(static_cast<std::uint16_t>(bits));
    if (!v.is_finite() || v.is_zero()) continue;
    ++c.finite_nonzero_patterns;
    if (!v.sign()) ++c.positive_per_binade[binade_of(f16_to_double(v))];
  }
  c.min_positive = f16_to_double(Binary16::from_bits(0x0001));
  c.max_finite = f16_to_double(Binary16::max_finite());
  return c;
}

HistogramOverlap histogram_overlap(std::span<const double> unique_values, std::span<const BinadeCensus> censuses)
{
  HistogramOverlap out;
  for (const auto& c : censuses) out.formats.push_back(c.format);
  if (unique_values.empty()) return out;

  std::map<int, std::size_t> data;
  std::size_t nonzero = 0;
  std::vector<std::size_t> covered(censuses.size(), 0);
  for (double x : unique_values) {
    ++out.total_values;
    if (x == 0.0) {
      ++out.zero_count;
      continue;
    }
    ++nonzero;
    ++data[binade_of(std::fabs(x))];
    for (std::size_t i = 0; i < censuses.size(); ++i) {
      const double m = std::fabs(x);
      if (m >= censuses[i].min_positive && m <= censuses[i].max_finite) ++covered[i];
    }
  }

  std::set<int> binades;
  for (const auto& [b, _] : data) binades.insert(b);
  for (const auto& c : censuses) {
    for (const auto& [b, _] : c.positive_per_binade) binades.insert(b);
  }
  for (int b : binades) {
    HistogramRow row;
    row.binade = b;
    if (auto it = data.find(b); it != data.end()) row.data = it->second;
    for (const auto& c : censuses) {
      const auto it = c.positive_per_binade.find(b);
      row.representable.push_back(it == c.positive_per_binade.end() ? 0 : it->second);
    }
    out.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < censuses.size(); ++i) {
    out.coverage.push_back(nonzero == 0 ? 1.0 : static_cast<double>(covered[i]) / static_cast<double>(nonzero));
  }
  return out;
}

}  // namespace tapered
