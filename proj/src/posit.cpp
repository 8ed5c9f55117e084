#include "tapered/posit.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <limits>
#include <mutex>
#include <vector>

namespace tapered {

namespace {

// A finite nonzero magnitude with its leading one at bit 63 of `sig`.
struct Unpacked {
  bool negative = false;
  int scale = 0;
  std::uint64_t sig = 0;
};

Unpacked unpack_slow(PositValue p) noexcept
{
  const DecodedPosit d = decode(p);
  return {d.sign < 0, d.scale, std::uint64_t{d.significand} << (63 - d.fraction_bits)};
}

// Narrow posits are unpacked through a table built once per configuration.
struct PackedEntry {
  std::int32_t scale;
  std::uint32_t sig;  // leading one at bit 31
};

constexpr int kTableMaxN = 16;

std::array<std::atomic<const PackedEntry*>, (kTableMaxN + 1) * 5> g_tables{};
std::mutex g_tables_mutex;

const PackedEntry* build_table(PositConfig cfg, int slot)
{
  const std::lock_guard lock(g_tables_mutex);
  if (const PackedEntry* t = g_tables[slot].load(std::memory_order_acquire)) return t;
  const std::uint32_t count = std::uint32_t{1} << cfg.n();
  // Lives for the rest of the process.
  auto* t = new PackedEntry[count];
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    const PositValue p{bits, cfg};
    if (p.is_zero() || p.is_nar()) {
      t[bits] = {0, 0};
      continue;
    }
    const Unpacked u = unpack_slow(p);
    t[bits] = {u.scale, static_cast<std::uint32_t>(u.sig >> 32)};
  }
  g_tables[slot].store(t, std::memory_order_release);
  return t;
}

inline const PackedEntry* unpack_table(PositConfig cfg)
{
  const int slot = cfg.n() * 5 + cfg.es();
  if (const PackedEntry* t = g_tables[slot].load(std::memory_order_acquire)) return t;
  return build_table(cfg, slot);
}

inline Unpacked unpack(PositValue p) noexcept
{
  if (p.config.n() <= kTableMaxN) {
    const PackedEntry e = unpack_table(p.config)[p.bits];
    return {((p.bits >> (p.config.n() - 1)) & 1u) != 0, e.scale, std::uint64_t{e.sig} << 32};
  }
  return unpack_slow(p);
}

// Builds the unbounded encoding of sign * 2^scale * sig/2^63 and rounds it to
// n bits: nearest, ties to the even pattern, clamped to [minpos, maxpos].
PositValue round_pack(PositConfig cfg, bool negative, int scale, std::uint64_t sig, bool sticky) noexcept
{
  const int n = cfg.n();
  const int es = cfg.es();
  std::uint32_t body = 0;
  if (scale >= cfg.max_scale()) {
    body = cfg.maxpos_bits();
  } else if (scale < -cfg.max_scale()) {
    body = cfg.minpos_bits();
  } else {
    const int k = scale >> es;
    const int e = scale - (k << es);
    int regime_len = 0;
    std::uint64_t regime = 0;
    if (k >= 0) {
      regime_len = k + 2;
      regime = ((std::uint64_t{1} << (k + 1)) - 1) << 1;
    } else {
      regime_len = 1 - k;
      regime = 1;
    }
    // [regime][exponent][fraction...] left-aligned in one word; pos >= 29.
    const int pos = 64 - regime_len - es;
    std::uint64_t word = regime << (64 - regime_len);
    word |= static_cast<std::uint64_t>(e) << pos;
    const std::uint64_t fraction = sig << 1;
    word |= fraction >> (64 - pos);
    sticky = sticky || (fraction << pos) != 0;

    body = static_cast<std::uint32_t>(word >> (65 - n));
    const bool round = (word >> (64 - n)) & 1u;
    sticky = sticky || (word & ((std::uint64_t{1} << (64 - n)) - 1)) != 0;
    if (round && (sticky || (body & 1u))) ++body;
    body = std::clamp(body, cfg.minpos_bits(), cfg.maxpos_bits());
  }
  const std::uint32_t out = negative ? (0u - body) & cfg.mask() : body;
  return {out, cfg};
}

void require_same_config(PositValue a, PositValue b)
{
  if (!(a.config == b.config)) throw std::invalid_argument("posit operands have different configurations");
}

}  // namespace

ExactReal DecodedPosit::to_exact() const noexcept
{
  switch (cls) {
    case PositClass::Zero: return ExactReal::zero();
    case PositClass::NaR: return ExactReal::not_real();
    case PositClass::Real: break;
  }
  return ExactReal::finite(sign < 0, significand, scale - fraction_bits);
}

DecodedPosit decode(PositValue p) noexcept
{
  const PositConfig cfg = p.config;
  const int n = cfg.n();
  const int es = cfg.es();
  DecodedPosit d;
  if (p.bits == 0) return d;
  if (p.bits == cfg.nar_bits()) {
    d.cls = PositClass::NaR;
    return d;
  }
  d.cls = PositClass::Real;
  const bool negative = (p.bits >> (n - 1)) & 1u;
  d.sign = negative ? -1 : 1;
  const std::uint32_t mag = negative ? (0u - p.bits) & cfg.mask() : p.bits;

  // Body (everything after the sign) left-aligned in a 32-bit word.
  const std::uint32_t body = mag << (33 - n);
  const bool first = body >> 31;
  const int run = std::min(first ? std::countl_one(body) : std::countl_zero(body), n - 1);
  d.regime = first ? run - 1 : -run;

  const int consumed = std::min(run + 1, n - 1);
  int left = n - 1 - consumed;
  const int taken = std::min(es, left);
  left -= taken;
  const std::uint32_t exp_field = taken == 0 ? 0u : (mag >> left) & ((1u << taken) - 1);
  d.exponent = static_cast<int>(exp_field << (es - taken));
  d.scale = d.regime * cfg.useed_log2() + d.exponent;
  d.fraction_bits = left;
  const std::uint32_t fraction = mag & ((std::uint32_t{1} << left) - 1);
  d.significand = (std::uint32_t{1} << left) | fraction;
  return d;
}

PositValue encode(const ExactReal& x, PositConfig cfg) noexcept
{
  switch (x.kind) {
    case ExactReal::Kind::Zero: return PositValue::zero(cfg);
    case ExactReal::Kind::Infinite:
    case ExactReal::Kind::NotReal: return PositValue::nar(cfg);
    case ExactReal::Kind::Finite: break;
  }
  const uint128 aligned = x.mantissa << (128 - bit_width128(x.mantissa));
  const auto sig = static_cast<std::uint64_t>(aligned >> 64);
  const bool sticky = x.inexact || static_cast<std::uint64_t>(aligned) != 0;
  return round_pack(cfg, x.negative, x.scale(), sig, sticky);
}

PositValue posit_neg(PositValue a) noexcept
{
  return {(0u - a.bits) & a.config.mask(), a.config};
}

PositValue posit_add(PositValue a, PositValue b)
{
  require_same_config(a, b);
  if (a.is_nar() || b.is_nar()) return PositValue::nar(a.config);
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;

  Unpacked big = unpack(a);
  Unpacked small = unpack(b);
  if (small.scale > big.scale || (small.scale == big.scale && small.sig > big.sig)) std::swap(big, small);

  // Both leading bits at 62 (room for a carry); the smaller one shifted right.
  const int d = big.scale - small.scale;
  const std::uint64_t x = big.sig >> 1;
  std::uint64_t y = 0;
  bool sticky = false;
  if (d < 63) {
    y = (small.sig >> 1) >> d;
    sticky = d > 0 && ((small.sig >> 1) & ((std::uint64_t{1} << d) - 1)) != 0;
  } else {
    sticky = true;
  }
  std::uint64_t sum = 0;
  if (big.negative == small.negative) {
    sum = x + y;
  } else {
    sum = x - y;
    if (sticky) --sum;  // the discarded tail is borrowed from the last unit
    if (sum == 0) return PositValue::zero(a.config);
  }
  const int lz = std::countl_zero(sum);
  return round_pack(a.config, big.negative, big.scale + 1 - lz, sum << lz, sticky);
}

PositValue posit_sub(PositValue a, PositValue b)
{
  require_same_config(a, b);
  return posit_add(a, posit_neg(b));
}

PositValue posit_mul(PositValue a, PositValue b)
{
  require_same_config(a, b);
  if (a.is_nar() || b.is_nar()) return PositValue::nar(a.config);
  if (a.is_zero() || b.is_zero()) return PositValue::zero(a.config);
  const Unpacked ua = unpack(a);
  const Unpacked ub = unpack(b);
  // Significands have at most 30 bits: the 60-bit product is exact.
  const std::uint64_t product = (ua.sig >> 34) * (ub.sig >> 34);
  const int lz = std::countl_zero(product);
  return round_pack(a.config, ua.negative != ub.negative, ua.scale + ub.scale + 5 - lz, product << lz, false);
}

PositValue posit_div(PositValue a, PositValue b)
{
  require_same_config(a, b);
  if (a.is_nar() || b.is_nar() || b.is_zero()) return PositValue::nar(a.config);
  if (a.is_zero()) return PositValue::zero(a.config);
  const Unpacked ua = unpack(a);
  const Unpacked ub = unpack(b);
  // 30-bit significands: the quotient carries at least 33 bits plus a sticky remainder.
  const std::uint64_t num = (ua.sig >> 34) << 33;
  const std::uint64_t den = ub.sig >> 34;
  const std::uint64_t q = num / den;
  const bool sticky = num % den != 0;
  const int lz = std::countl_zero(q);
  return round_pack(a.config, ua.negative != ub.negative, ua.scale - ub.scale - 33 + 63 - lz, q << lz, sticky);
}

std::partial_ordering posit_compare(PositValue a, PositValue b)
{
  require_same_config(a, b);
  if (a.is_nar() || b.is_nar()) return std::partial_ordering::unordered;
  return a.as_signed() <=> b.as_signed();
}

PositValue int2pos(std::int32_t value, PositConfig cfg) noexcept
{
  return encode(ExactReal::from_int(value), cfg);
}

std::optional<std::int32_t> pos2int(PositValue p) noexcept
{
  const DecodedPosit d = decode(p);
  if (d.cls == PositClass::NaR) return std::nullopt;
  if (d.cls == PositClass::Zero) return 0;

  constexpr std::int64_t lo = std::numeric_limits<std::int32_t>::min();
  constexpr std::int64_t hi = std::numeric_limits<std::int32_t>::max();
  std::int64_t magnitude = 0;
  if (d.scale >= 31) {
    magnitude = hi + 1;
  } else if (d.scale < -1) {
    magnitude = 0;  // below one half
  } else {
    const int shift = d.scale - d.fraction_bits;
    const std::uint64_t sig = d.significand;
    if (shift >= 0) {
      magnitude = static_cast<std::int64_t>(sig << shift);
    } else {
      const int r = -shift;
      std::uint64_t q = sig >> r;
      const std::uint64_t rem = sig & ((std::uint64_t{1} << r) - 1);
      const std::uint64_t half = std::uint64_t{1} << (r - 1);
      if (rem > half || (rem == half && (q & 1u))) ++q;
      magnitude = static_cast<std::int64_t>(q);
    }
  }
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(d.sign * magnitude, lo, hi));
}

}  // namespace tapered
