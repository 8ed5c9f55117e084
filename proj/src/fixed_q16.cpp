#include "tapered/fixed_q16.hpp"

#include <cmath>
#include <limits>

namespace tapered {

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int32_t>::max();

FixedQ16 saturate(std::int64_t wide, bool sticky) noexcept
{
  if (wide > kMax) return {static_cast<std::int32_t>(kMax), true};
  if (wide < kMin) return {static_cast<std::int32_t>(kMin), true};
  return {static_cast<std::int32_t>(wide), sticky};
}

// num / den rounded to nearest, ties away from zero. den != 0.
std::int64_t div_round_away(std::int64_t num, std::int64_t den) noexcept
{
  const bool neg = (num < 0) != (den < 0);
  const std::uint64_t n = num < 0 ? 0 - static_cast<std::uint64_t>(num) : static_cast<std::uint64_t>(num);
  const std::uint64_t d = den < 0 ? 0 - static_cast<std::uint64_t>(den) : static_cast<std::uint64_t>(den);
  std::uint64_t q = n / d;
  const std::uint64_t r = n % d;
  if (r >= d - r) ++q;  // 2r >= d without overflow
  return neg ? -static_cast<std::int64_t>(q) : static_cast<std::int64_t>(q);
}

}  // namespace

FixedQ16 FixedQ16::from_double(double x) noexcept
{
  if (std::isnan(x)) return {0, true};
  const double scaled = std::round(x * kOne);  // std::round ties away from zero
  if (scaled > static_cast<double>(kMax)) return {static_cast<std::int32_t>(kMax), true};
  if (scaled < static_cast<double>(kMin)) return {static_cast<std::int32_t>(kMin), true};
  return {static_cast<std::int32_t>(scaled), false};
}

FixedQ16 q16_add(FixedQ16 a, FixedQ16 b) noexcept
{
  return saturate(std::int64_t{a.raw} + b.raw, a.overflowed || b.overflowed);
}

FixedQ16 q16_sub(FixedQ16 a, FixedQ16 b) noexcept
{
  return saturate(std::int64_t{a.raw} - b.raw, a.overflowed || b.overflowed);
}

FixedQ16 q16_neg(FixedQ16 a) noexcept { return saturate(-std::int64_t{a.raw}, a.overflowed); }

FixedQ16 q16_mul(FixedQ16 a, FixedQ16 b) noexcept
{
  const std::int64_t product = std::int64_t{a.raw} * b.raw;
  return saturate(div_round_away(product, FixedQ16::kOne), a.overflowed || b.overflowed);
}

FixedQ16 q16_div(FixedQ16 a, FixedQ16 b) noexcept
{
  if (b.raw == 0) {
    return {static_cast<std::int32_t>(a.raw < 0 ? kMin : kMax), true};
  }
  const std::int64_t num = std::int64_t{a.raw} * FixedQ16::kOne;
  return saturate(div_round_away(num, b.raw), a.overflowed || b.overflowed);
}

}  // namespace tapered
