#include "tapered/binary16.hpp"

#include <algorithm>
#include <bit>

namespace tapered {

namespace {

constexpr int kMinExponent = -24;  // weight of the subnormal LSB
constexpr int kFractionBits = 10;

Binary16 signed_zero(bool negative) noexcept { return {static_cast<std::uint16_t>(negative ? 0x8000 : 0)}; }

// Rounds sign * 2^scale * sig/2^63 (leading one at bit 63, `sticky` for any
// nonzero tail) to nearest-even, with gradual underflow and overflow to inf.
Binary16 round_pack(bool negative, int scale, std::uint64_t sig, bool sticky) noexcept
{
  if (scale > 15) return Binary16::infinity(negative);
  int lsb = std::max(scale - kFractionBits, kMinExponent);
  const int kept = scale - lsb + 1;  // significant bits that land in the format
  std::uint64_t q = 0;
  bool round = false;
  if (kept > 0) {
    q = sig >> (64 - kept);
    round = (sig >> (63 - kept)) & 1u;
    sticky = sticky || (sig << (kept + 1)) != 0;
  } else if (kept == 0) {
    round = true;  // the leading one itself
    sticky = sticky || (sig << 1) != 0;
  } else {
    sticky = true;
  }
  if (round && (sticky || (q & 1u))) ++q;
  if (q >= 0x800u) {
    q >>= 1;
    ++lsb;
  }
  const std::uint16_t sign = negative ? 0x8000u : 0u;
  if (q >= 0x400u) {
    const int biased = lsb + 25;
    if (biased >= 31) return Binary16::infinity(negative);
    return {static_cast<std::uint16_t>(sign | (biased << 10) | (q & 0x3FFu))};
  }
  return {static_cast<std::uint16_t>(sign | q)};
}

// Integer significand and the weight of its last bit, for finite nonzero values.
struct Parts {
  bool negative;
  std::uint32_t sig;
  int lsb;
};

Parts parts(Binary16 v) noexcept
{
  const unsigned e = v.exponent_field();
  const unsigned f = v.fraction_field();
  if (e == 0) return {v.sign(), f, kMinExponent};
  return {v.sign(), 0x400u | f, static_cast<int>(e) - 25};
}

Binary16 pack_integer(bool negative, std::uint64_t mag, int lsb, bool sticky) noexcept
{
  const int lz = std::countl_zero(mag);
  return round_pack(negative, lsb + 63 - lz, mag << lz, sticky);
}

}  // namespace

HalfClass f16_classify(Binary16 v) noexcept
{
  const unsigned e = v.exponent_field();
  const unsigned f = v.fraction_field();
  if (e == 0) return f == 0 ? HalfClass::Zero : HalfClass::Subnormal;
  if (e == 31) return f == 0 ? HalfClass::Infinity : HalfClass::NaN;
  return HalfClass::Normal;
}

ExactReal f16_to_real(Binary16 v) noexcept
{
  const bool neg = v.sign();
  const unsigned e = v.exponent_field();
  const unsigned f = v.fraction_field();
  if (e == 31) return f == 0 ? ExactReal::infinity(neg) : ExactReal::not_real();
  if (e == 0) return ExactReal::finite(neg, f, kMinExponent);
  return ExactReal::finite(neg, 0x400u | f, static_cast<int>(e) - 25);
}

Binary16 f16_from_real(const ExactReal& x) noexcept
{
  switch (x.kind) {
    case ExactReal::Kind::Zero: return signed_zero(x.negative);
    case ExactReal::Kind::Infinite: return Binary16::infinity(x.negative);
    case ExactReal::Kind::NotReal: return Binary16::quiet_nan();
    case ExactReal::Kind::Finite: break;
  }
  const uint128 aligned = x.mantissa << (128 - bit_width128(x.mantissa));
  const bool sticky = x.inexact || static_cast<std::uint64_t>(aligned) != 0;
  return round_pack(x.negative, x.scale(), static_cast<std::uint64_t>(aligned >> 64), sticky);
}

Binary16 f16_add(Binary16 a, Binary16 b) noexcept
{
  if (a.is_nan() || b.is_nan()) return Binary16::quiet_nan();
  if (a.is_inf() || b.is_inf()) {
    if (a.is_inf() && b.is_inf() && a.sign() != b.sign()) return Binary16::quiet_nan();
    return a.is_inf() ? a : b;
  }
  if (a.is_zero() && b.is_zero()) return signed_zero(a.sign() && b.sign());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Exact in units of 2^-24: every finite magnitude is below 2^40 of them.
  const Parts pa = parts(a);
  const Parts pb = parts(b);
  const std::int64_t ia = std::int64_t{pa.sig} << (pa.lsb - kMinExponent);
  const std::int64_t ib = std::int64_t{pb.sig} << (pb.lsb - kMinExponent);
  const std::int64_t sum = (pa.negative ? -ia : ia) + (pb.negative ? -ib : ib);
  // Exact cancellation yields +0 under round-to-nearest.
  if (sum == 0) return signed_zero(false);
  return pack_integer(sum < 0, static_cast<std::uint64_t>(sum < 0 ? -sum : sum), kMinExponent, false);
}

Binary16 f16_sub(Binary16 a, Binary16 b) noexcept
{
  if (b.is_nan()) return Binary16::quiet_nan();
  return f16_add(a, f16_neg(b));
}

Binary16 f16_mul(Binary16 a, Binary16 b) noexcept
{
  if (a.is_nan() || b.is_nan()) return Binary16::quiet_nan();
  const bool neg = a.sign() != b.sign();
  if (a.is_inf() || b.is_inf()) {
    if (a.is_zero() || b.is_zero()) return Binary16::quiet_nan();
    return Binary16::infinity(neg);
  }
  if (a.is_zero() || b.is_zero()) return signed_zero(neg);
  const Parts pa = parts(a);
  const Parts pb = parts(b);
  return pack_integer(neg, std::uint64_t{pa.sig} * pb.sig, pa.lsb + pb.lsb, false);
}

Binary16 f16_div(Binary16 a, Binary16 b) noexcept
{
  if (a.is_nan() || b.is_nan()) return Binary16::quiet_nan();
  const bool neg = a.sign() != b.sign();
  if (a.is_inf()) return b.is_inf() ? Binary16::quiet_nan() : Binary16::infinity(neg);
  if (b.is_inf()) return signed_zero(neg);
  if (b.is_zero()) return a.is_zero() ? Binary16::quiet_nan() : Binary16::infinity(neg);
  if (a.is_zero()) return signed_zero(neg);
  const Parts pa = parts(a);
  const Parts pb = parts(b);
  // Dividend normalised to bit 52 leaves at least 41 quotient bits.
  const int shift = 52 - (std::bit_width(pa.sig) - 1);
  const std::uint64_t num = std::uint64_t{pa.sig} << shift;
  const std::uint64_t q = num / pb.sig;
  return pack_integer(neg, q, pa.lsb - shift - pb.lsb, num % pb.sig != 0);
}

std::partial_ordering f16_compare(Binary16 a, Binary16 b) noexcept
{
  if (a.is_nan() || b.is_nan()) return std::partial_ordering::unordered;
  if (a.is_zero() && b.is_zero()) return std::partial_ordering::equivalent;
  // Sign-magnitude to a monotone integer key.
  auto key = [](Binary16 v) {
    const int mag = v.bits & 0x7FFF;
    return v.sign() ? -mag : mag;
  };
  return key(a) <=> key(b);
}

}  // namespace tapered
