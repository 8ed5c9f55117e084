#pragma once

#include <compare>
#include <cstdint>

#include "tapered/exact_real.hpp"

namespace tapered {

/// IEEE 754 binary16 bit pattern: 1 sign, 5 exponent, 10 fraction bits.
struct Binary16 {
  std::uint16_t bits = 0;

  static constexpr Binary16 from_bits(std::uint16_t b) noexcept { return {b}; }
  static constexpr Binary16 quiet_nan() noexcept { return {0x7E00}; }
  static constexpr Binary16 infinity(bool negative = false) noexcept
  {
    return {static_cast<std::uint16_t>(negative ? 0xFC00 : 0x7C00)};
  }
  static constexpr Binary16 max_finite() noexcept { return {0x7BFF}; }  // 65504

  constexpr bool sign() const noexcept { return bits >> 15; }
  constexpr unsigned exponent_field() const noexcept { return (bits >> 10) & 0x1Fu; }
  constexpr unsigned fraction_field() const noexcept { return bits & 0x3FFu; }

  constexpr bool is_nan() const noexcept { return exponent_field() == 31 && fraction_field() != 0; }
  constexpr bool is_inf() const noexcept { return exponent_field() == 31 && fraction_field() == 0; }
  constexpr bool is_zero() const noexcept { return (bits & 0x7FFF) == 0; }
  constexpr bool is_finite() const noexcept { return exponent_field() != 31; }

  friend constexpr bool operator==(Binary16, Binary16) = default;
};

enum class HalfClass : std::uint8_t { Zero, Subnormal, Normal, Infinity, NaN };

HalfClass f16_classify(Binary16 v) noexcept;

/// Round-to-nearest-even conversion; overflow gives infinity, NotReal the
/// canonical quiet NaN.
Binary16 f16_from_real(const ExactReal& x) noexcept;
/// Exact for finite values (signed zero kept); Infinite and NotReal otherwise.
ExactReal f16_to_real(Binary16 v) noexcept;

inline Binary16 f16_from_double(double x) noexcept { return f16_from_real(ExactReal::from_double(x)); }
inline double f16_to_double(Binary16 v) noexcept { return f16_to_real(v).to_double(); }

Binary16 f16_add(Binary16 a, Binary16 b) noexcept;
Binary16 f16_sub(Binary16 a, Binary16 b) noexcept;
Binary16 f16_mul(Binary16 a, Binary16 b) noexcept;
Binary16 f16_div(Binary16 a, Binary16 b) noexcept;
inline Binary16 f16_neg(Binary16 a) noexcept { return {static_cast<std::uint16_t>(a.bits ^ 0x8000u)}; }

std::partial_ordering f16_compare(Binary16 a, Binary16 b) noexcept;

}  // namespace tapered
