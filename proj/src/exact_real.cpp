#include "tapered/exact_real.hpp"

#include <cmath>
#include <utility>

namespace tapered {

namespace {

int countr_zero128(uint128 v) noexcept
{
  const auto lo = static_cast<std::uint64_t>(v);
  if (lo != 0) return std::countr_zero(lo);
  return 64 + std::countr_zero(static_cast<std::uint64_t>(v >> 64));
}

}  // namespace

ExactReal ExactReal::finite(bool negative, uint128 mantissa, int exponent) noexcept
{
  if (mantissa == 0) return zero(negative);
  ExactReal r{Kind::Finite, negative, exponent, mantissa, false};
  const int tz = countr_zero128(mantissa);
  r.mantissa >>= tz;
  r.exponent += tz;
  return r;
}

ExactReal ExactReal::from_int(std::int64_t value) noexcept
{
  if (value == 0) return zero();
  const bool neg = value < 0;
  // Two's complement negation in unsigned space keeps INT64_MIN exact.
  const auto mag = neg ? uint128(~static_cast<std::uint64_t>(value)) + 1 : uint128(value);
  return finite(neg, mag, 0);
}

ExactReal ExactReal::from_double(double value) noexcept
{
  if (std::isnan(value)) return not_real();
  if (std::isinf(value)) return infinity(std::signbit(value));
  if (value == 0.0) return zero(std::signbit(value));
  int exp = 0;
  const double frac = std::frexp(std::fabs(value), &exp);
  const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  return finite(std::signbit(value), mant, exp - 53);
}

double ExactReal::to_double() const noexcept
{
  switch (kind) {
    case Kind::Zero: return negative ? -0.0 : 0.0;
    case Kind::Infinite: return negative ? -HUGE_VAL : HUGE_VAL;
    case Kind::NotReal: return std::nan("");
    case Kind::Finite: break;
  }
  uint128 m = mantissa;
  int e = exponent;
  const int width = bit_width128(m);
  if (width > 64) {
    m >>= width - 64;
    e += width - 64;
  }
  const double mag = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(m)), e);
  return negative ? -mag : mag;
}

ExactReal exact_negate(ExactReal a) noexcept
{
  if (a.kind != ExactReal::Kind::NotReal) a.negative = !a.negative;
  return a;
}

ExactReal exact_add(const ExactReal& a, const ExactReal& b) noexcept
{
  if (a.is_zero()) return b.is_zero() ? ExactReal::zero(a.negative && b.negative) : b;
  if (b.is_zero()) return a;

  const ExactReal* big = &a;
  const ExactReal* small = &b;
  if (b.scale() > a.scale()) std::swap(big, small);

  // Leading bit of the larger operand goes to bit 125, leaving room for a carry.
  constexpr int top = 125;
  const int big_shift = top - (bit_width128(big->mantissa) - 1);
  const int base = big->exponent - big_shift;
  const uint128 big_m = big->mantissa << big_shift;

  uint128 small_m = 0;
  bool lost = false;
  const int small_shift = small->exponent - base;
  if (small_shift >= 0) {
    small_m = small->mantissa << small_shift;
  } else if (-small_shift < 128) {
    const int r = -small_shift;
    small_m = small->mantissa >> r;
    lost = (small->mantissa & ((uint128(1) << r) - 1)) != 0;
  } else {
    lost = true;
  }

  if (big->negative == small->negative) {
    if (!lost) return ExactReal::finite(big->negative, big_m + small_m, base);
    return {ExactReal::Kind::Finite, big->negative, base, big_m + small_m, true};
  }

  if (big_m == small_m && !lost) return ExactReal::zero();
  bool neg = big->negative;
  uint128 diff = 0;
  if (big_m >= small_m) {
    diff = big_m - small_m;
  } else {
    diff = small_m - big_m;
    neg = small->negative;
  }
  if (!lost) return ExactReal::finite(neg, diff, base);
  // The discarded tail of the smaller operand lies in (0, 1) units: borrow one.
  return {ExactReal::Kind::Finite, neg, base, diff - 1, true};
}

ExactReal exact_mul(const ExactReal& a, const ExactReal& b) noexcept
{
  const bool neg = a.negative != b.negative;
  if (a.is_zero() || b.is_zero()) return ExactReal::zero(neg);
  return ExactReal::finite(neg, a.mantissa * b.mantissa, a.exponent + b.exponent);
}

ExactReal exact_div(const ExactReal& a, const ExactReal& b) noexcept
{
  const bool neg = a.negative != b.negative;
  if (a.is_zero()) return ExactReal::zero(neg);
  const int shift = 127 - bit_width128(a.mantissa);
  const uint128 num = a.mantissa << shift;
  const uint128 q = num / b.mantissa;
  const uint128 r = num % b.mantissa;
  const int exponent = a.exponent - shift - b.exponent;
  if (r == 0) return ExactReal::finite(neg, q, exponent);
  return {ExactReal::Kind::Finite, neg, exponent, q, true};
}

}  // namespace tapered
