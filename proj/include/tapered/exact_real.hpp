#pragma once

#include <bit>
#include <cstdint>

namespace tapered {

using uint128 = unsigned __int128;

/// Number of significant bits in a 128-bit word (0 for zero).
inline int bit_width128(uint128 v) noexcept
{
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(v));
}

/// A real number carried exactly as sign * mantissa * 2^exponent.
///
/// Quotients and far-apart sums cannot always be held in 128 bits; for those the
/// `inexact` flag records that the true magnitude lies strictly between
/// mantissa * 2^exponent and (mantissa + 1) * 2^exponent. The retained mantissa
/// always carries far more bits than any 32-bit target format needs, so rounding
/// from an inexact value is still correct.
struct ExactReal {
  enum class Kind : std::uint8_t { Zero, Finite, Infinite, NotReal };

  Kind kind = Kind::Zero;
  bool negative = false;
  int exponent = 0;
  uint128 mantissa = 0;
  bool inexact = false;

  static ExactReal zero(bool negative = false) noexcept { return {Kind::Zero, negative, 0, 0, false}; }
  static ExactReal not_real() noexcept { return {Kind::NotReal, false, 0, 0, false}; }
  static ExactReal infinity(bool negative) noexcept { return {Kind::Infinite, negative, 0, 0, false}; }
  static ExactReal finite(bool negative, uint128 mantissa, int exponent) noexcept;
  static ExactReal from_int(std::int64_t value) noexcept;
  static ExactReal from_double(double value) noexcept;

  bool is_zero() const noexcept { return kind == Kind::Zero; }
  bool is_finite() const noexcept { return kind == Kind::Finite; }

  /// Exponent of the leading one bit: the value lies in [2^scale, 2^(scale+1)).
  int scale() const noexcept { return exponent + bit_width128(mantissa) - 1; }

  /// Nearest binary64 (used only for diagnostics and reference conversions).
  double to_double() const noexcept;

  friend bool operator==(const ExactReal&, const ExactReal&) = default;
};

/// Exact sum of two exact finite-or-zero operands (inexact only if the smaller
/// operand falls entirely below a 126-bit window under the larger one).
ExactReal exact_add(const ExactReal& a, const ExactReal& b) noexcept;
ExactReal exact_negate(ExactReal a) noexcept;
ExactReal exact_mul(const ExactReal& a, const ExactReal& b) noexcept;
/// Quotient carried to at least 62 significant bits with a remainder sticky flag.
/// Operands must be finite; the divisor nonzero.
ExactReal exact_div(const ExactReal& a, const ExactReal& b) noexcept;

}  // namespace tapered
