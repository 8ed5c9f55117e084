#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "tapered/exact_real.hpp"

namespace tapered {

/// Posit configuration: total width n in [2, 32] and exponent size es in [0, 4].
class PositConfig {
 public:
  constexpr PositConfig(int n, int es) : n_(n), es_(es)
  {
    if (n < 2 || n > 32 || es < 0 || es > 4 || es > n - 1) {
      throw std::invalid_argument("unsupported posit configuration (" + std::to_string(n) + "," +
                                  std::to_string(es) + ")");
    }
  }

  constexpr int n() const noexcept { return n_; }
  constexpr int es() const noexcept { return es_; }

  /// log2(useed) = 2^es.
  constexpr int useed_log2() const noexcept { return 1 << es_; }
  /// Scale of maxpos; minpos has the negated scale.
  constexpr int max_scale() const noexcept { return (n_ - 2) * useed_log2(); }

  constexpr std::uint32_t mask() const noexcept
  {
    return n_ == 32 ? 0xFFFF'FFFFu : (std::uint32_t{1} << n_) - 1;
  }
  constexpr std::uint32_t nar_bits() const noexcept { return std::uint32_t{1} << (n_ - 1); }
  constexpr std::uint32_t maxpos_bits() const noexcept { return nar_bits() - 1; }
  constexpr std::uint32_t minpos_bits() const noexcept { return 1; }

  friend constexpr bool operator==(PositConfig, PositConfig) = default;

 private:
  int n_;
  int es_;
};

/// An n-bit posit pattern together with its configuration.
struct PositValue {
  std::uint32_t bits = 0;
  PositConfig config{16, 2};

  static constexpr PositValue from_bits(std::uint32_t bits, PositConfig cfg) noexcept
  {
    return {bits & cfg.mask(), cfg};
  }
  static constexpr PositValue zero(PositConfig cfg) noexcept { return {0, cfg}; }
  static constexpr PositValue nar(PositConfig cfg) noexcept { return {cfg.nar_bits(), cfg}; }
  static constexpr PositValue maxpos(PositConfig cfg) noexcept { return {cfg.maxpos_bits(), cfg}; }
  static constexpr PositValue minpos(PositConfig cfg) noexcept { return {cfg.minpos_bits(), cfg}; }

  constexpr bool is_nar() const noexcept { return bits == config.nar_bits(); }
  constexpr bool is_zero() const noexcept { return bits == 0; }

  /// Pattern read as an n-bit two's-complement integer; orders like the reals.
  constexpr std::int32_t as_signed() const noexcept
  {
    const int shift = 32 - config.n();
    return static_cast<std::int32_t>(bits << shift) >> shift;
  }

  friend constexpr bool operator==(PositValue, PositValue) = default;
};

enum class PositClass : std::uint8_t { Zero, NaR, Real };

/// Field-level view of a posit. For Real values
/// value = sign * 2^scale * significand / 2^fraction_bits exactly, where the
/// significand includes the hidden bit.
struct DecodedPosit {
  PositClass cls = PositClass::Zero;
  int sign = 1;
  int regime = 0;  ///< k
  int exponent = 0;
  int scale = 0;   ///< 2^es * k + exponent
  std::uint32_t significand = 0;
  int fraction_bits = 0;

  ExactReal to_exact() const noexcept;
};

DecodedPosit decode(PositValue p) noexcept;

/// Round-to-nearest, ties to the even pattern, on the posit encoding. Values
/// beyond maxpos clamp to maxpos and nonzero values below minpos to minpos.
/// Infinities and NotReal map to NaR.
PositValue encode(const ExactReal& x, PositConfig cfg) noexcept;

inline double to_double(PositValue p) noexcept { return decode(p).to_exact().to_double(); }
inline PositValue from_double(double x, PositConfig cfg) noexcept
{
  return encode(ExactReal::from_double(x), cfg);
}

PositValue posit_neg(PositValue a) noexcept;
PositValue posit_add(PositValue a, PositValue b);
PositValue posit_sub(PositValue a, PositValue b);
PositValue posit_mul(PositValue a, PositValue b);
PositValue posit_div(PositValue a, PositValue b);

/// NaR is unordered; everything else orders by the signed pattern.
std::partial_ordering posit_compare(PositValue a, PositValue b);

PositValue int2pos(std::int32_t value, PositConfig cfg) noexcept;
/// Nearest integer, ties to even, saturating at the int32 bounds; nullopt for NaR.
std::optional<std::int32_t> pos2int(PositValue p) noexcept;

}  // namespace tapered
