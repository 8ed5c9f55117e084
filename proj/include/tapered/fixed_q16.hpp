#pragma once

#include <compare>
#include <cstdint>

namespace tapered {

/// Signed Q16.16 fixed point with a sticky overflow flag.
///
/// Results saturate at [-32768, 32768 - 2^-16]; any saturation (and division by
/// zero) sets `overflowed`, which every operation propagates from its operands.
struct FixedQ16 {
  std::int32_t raw = 0;
  bool overflowed = false;

  static constexpr std::int32_t kOne = 1 << 16;

  static constexpr FixedQ16 from_raw(std::int32_t r) noexcept { return {r, false}; }
  static constexpr FixedQ16 from_int(std::int32_t i) noexcept { return {i * kOne, false}; }
  /// Round to nearest, ties away from zero; saturating.
  static FixedQ16 from_double(double x) noexcept;

  constexpr double to_double() const noexcept { return static_cast<double>(raw) / kOne; }

  friend constexpr bool operator==(FixedQ16, FixedQ16) = default;
};

FixedQ16 q16_add(FixedQ16 a, FixedQ16 b) noexcept;
FixedQ16 q16_sub(FixedQ16 a, FixedQ16 b) noexcept;
FixedQ16 q16_mul(FixedQ16 a, FixedQ16 b) noexcept;
FixedQ16 q16_div(FixedQ16 a, FixedQ16 b) noexcept;
FixedQ16 q16_neg(FixedQ16 a) noexcept;

inline std::strong_ordering q16_compare(FixedQ16 a, FixedQ16 b) noexcept { return a.raw <=> b.raw; }

}  // namespace tapered
