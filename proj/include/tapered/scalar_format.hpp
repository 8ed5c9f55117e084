#pragma once

#include <cmath>
#include <compare>
#include <concepts>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tapered/binary16.hpp"
#include "tapered/fixed_q16.hpp"
#include "tapered/posit.hpp"

namespace tapered {

/// The arithmetic a scalar format must supply for the flow kernel.
template <class F>
concept ScalarFormat = requires(const F& f, typename F::value_type a, typename F::value_type b, int pixel,
                                double real) {
  { f.name() } -> std::convertible_to<std::string>;
  { f.from_pixel(pixel) } -> std::same_as<typename F::value_type>;
  { f.from_real(real) } -> std::same_as<typename F::value_type>;
  { f.add(a, b) } -> std::same_as<typename F::value_type>;
  { f.sub(a, b) } -> std::same_as<typename F::value_type>;
  { f.mul(a, b) } -> std::same_as<typename F::value_type>;
  { f.div(a, b) } -> std::same_as<typename F::value_type>;
  { f.neg(a) } -> std::same_as<typename F::value_type>;
  { f.compare(a, b) } -> std::convertible_to<std::partial_ordering>;
  { f.is_exception(a) } -> std::same_as<bool>;
  { f.to_reference(a) } -> std::same_as<double>;
};

template <ScalarFormat F>
using scalar_t = typename F::value_type;

/// Records every arithmetic result of a tapped reference run.
class ValueTap {
 public:
  void record(double v) { values_.push_back(v); }
  std::size_t size() const noexcept { return values_.size(); }
  void clear() noexcept { values_.clear(); }
  const std::vector<double>& raw() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Distinct finite recorded values in ascending order (-0 and +0 merge).
std::vector<double> tap_unique_values(const ValueTap& tap);

/// Plain binary64 arithmetic, optionally reporting each result to a tap.
struct ReferenceFormat {
  using value_type = double;
  ValueTap* tap = nullptr;

  std::string name() const { return "reference"; }
  double from_pixel(int p) const noexcept { return p; }
  double from_real(double x) const noexcept { return x; }
  double add(double a, double b) const { return record(a + b); }
  double sub(double a, double b) const { return record(a - b); }
  double mul(double a, double b) const { return record(a * b); }
  double div(double a, double b) const { return record(a / b); }
  double neg(double a) const noexcept { return -a; }
  std::partial_ordering compare(double a, double b) const noexcept { return a <=> b; }
  bool is_exception(double a) const noexcept { return !std::isfinite(a); }
  double to_reference(double a) const noexcept { return a; }

 private:
  double record(double v) const
  {
    if (tap != nullptr) tap->record(v);
    return v;
  }
};

struct PositFormat {
  using value_type = PositValue;
  PositConfig config{16, 2};

  std::string name() const { return "posit" + std::to_string(config.n()) + "," + std::to_string(config.es()); }
  PositValue from_pixel(int p) const noexcept { return int2pos(p, config); }
  PositValue from_real(double x) const noexcept { return from_double(x, config); }
  PositValue add(PositValue a, PositValue b) const { return posit_add(a, b); }
  PositValue sub(PositValue a, PositValue b) const { return posit_sub(a, b); }
  PositValue mul(PositValue a, PositValue b) const { return posit_mul(a, b); }
  PositValue div(PositValue a, PositValue b) const { return posit_div(a, b); }
  PositValue neg(PositValue a) const noexcept { return posit_neg(a); }
  std::partial_ordering compare(PositValue a, PositValue b) const { return posit_compare(a, b); }
  bool is_exception(PositValue a) const noexcept { return a.is_nar(); }
  double to_reference(PositValue a) const noexcept { return to_double(a); }
};

struct Binary16Format {
  using value_type = Binary16;

  std::string name() const { return "float16"; }
  Binary16 from_pixel(int p) const noexcept { return f16_from_real(ExactReal::from_int(p)); }
  Binary16 from_real(double x) const noexcept { return f16_from_double(x); }
  Binary16 add(Binary16 a, Binary16 b) const noexcept { return f16_add(a, b); }
  Binary16 sub(Binary16 a, Binary16 b) const noexcept { return f16_sub(a, b); }
  Binary16 mul(Binary16 a, Binary16 b) const noexcept { return f16_mul(a, b); }
  Binary16 div(Binary16 a, Binary16 b) const noexcept { return f16_div(a, b); }
  Binary16 neg(Binary16 a) const noexcept { return f16_neg(a); }
  std::partial_ordering compare(Binary16 a, Binary16 b) const noexcept { return f16_compare(a, b); }
  bool is_exception(Binary16 a) const noexcept { return !a.is_finite(); }
  double to_reference(Binary16 a) const noexcept { return f16_to_double(a); }
};

struct FixedQ16Format {
  using value_type = FixedQ16;

  std::string name() const { return "q16"; }
  FixedQ16 from_pixel(int p) const noexcept { return FixedQ16::from_int(p); }
  FixedQ16 from_real(double x) const noexcept { return FixedQ16::from_double(x); }
  FixedQ16 add(FixedQ16 a, FixedQ16 b) const noexcept { return q16_add(a, b); }
  FixedQ16 sub(FixedQ16 a, FixedQ16 b) const noexcept { return q16_sub(a, b); }
  FixedQ16 mul(FixedQ16 a, FixedQ16 b) const noexcept { return q16_mul(a, b); }
  FixedQ16 div(FixedQ16 a, FixedQ16 b) const noexcept { return q16_div(a, b); }
  FixedQ16 neg(FixedQ16 a) const noexcept { return q16_neg(a); }
  std::partial_ordering compare(FixedQ16 a, FixedQ16 b) const noexcept { return q16_compare(a, b); }
  bool is_exception(FixedQ16 a) const noexcept { return a.overflowed; }
  double to_reference(FixedQ16 a) const noexcept { return a.to_double(); }
};

static_assert(ScalarFormat<ReferenceFormat>);
static_assert(ScalarFormat<PositFormat>);
static_assert(ScalarFormat<Binary16Format>);
static_assert(ScalarFormat<FixedQ16Format>);

using AnyFormat = std::variant<ReferenceFormat, PositFormat, Binary16Format, FixedQ16Format>;

/// Parses "reference", "posit:n,es", "float16" or "q16"; throws std::invalid_argument.
AnyFormat parse_format(std::string_view spec);
std::string format_name(const AnyFormat& fmt);

/// pixel / norm computed in the target format from exact operands.
template <ScalarFormat F>
scalar_t<F> normalize_pixel(int pixel, int norm, const F& fmt)
{
  if (pixel < 0 || pixel > 255) throw std::invalid_argument("pixel value outside 0..255");
  if (norm < 1 || norm > 255) throw std::invalid_argument("norm outside 1..255");
  return fmt.div(fmt.from_pixel(pixel), fmt.from_pixel(norm));
}

}  // namespace tapered
