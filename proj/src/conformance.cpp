#include "tapered/conformance.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "tapered/binary16.hpp"

namespace tapered::conformance {

namespace {

namespace mp = boost::multiprecision;
using mp::cpp_int;
// Fixed-width signed integers: no allocation, plenty for every narrow format.
using Int256 = mp::number<mp::cpp_int_backend<256, 256, mp::signed_magnitude, mp::unchecked, void>>;
using Int512 = mp::number<mp::cpp_int_backend<512, 512, mp::signed_magnitude, mp::unchecked, void>>;

// value = mant * 2^exp
template <class Int>
struct Dyadic {
  Int mant;
  long exp = 0;
};

template <class Int>
long top_bit(const Dyadic<Int>& d)
{
  return static_cast<long>(mp::msb(abs(d.mant))) + d.exp;
}

template <class Int>
int compare(const Dyadic<Int>& p, const Dyadic<Int>& q)
{
  const int sp = p.mant.sign();
  const int sq = q.mant.sign();
  if (sp != sq) return sp < sq ? -1 : 1;
  if (sp == 0) return 0;
  const long tp = top_bit(p);
  const long tq = top_bit(q);
  if (tp != tq) return (tp > tq ? 1 : -1) * sp;
  if (p.exp >= q.exp) {
    const Int lhs = p.mant << static_cast<unsigned>(p.exp - q.exp);
    return lhs < q.mant ? -1 : (lhs > q.mant ? 1 : 0);
  }
  const Int rhs = q.mant << static_cast<unsigned>(q.exp - p.exp);
  return p.mant < rhs ? -1 : (p.mant > rhs ? 1 : 0);
}

template <class Int>
Dyadic<Int> add(const Dyadic<Int>& p, const Dyadic<Int>& q)
{
  if (p.mant == 0) return q;
  if (q.mant == 0) return p;
  const long e = std::min(p.exp, q.exp);
  return {(p.mant << static_cast<unsigned>(p.exp - e)) + (q.mant << static_cast<unsigned>(q.exp - e)), e};
}

template <class Int>
Dyadic<Int> negate(const Dyadic<Int>& p)
{
  return {-p.mant, p.exp};
}

template <class Int>
Dyadic<Int> mul(const Dyadic<Int>& p, const Dyadic<Int>& q)
{
  return {p.mant * q.mant, p.exp + q.exp};
}

// An exact operation result: numerator / denominator with denominator > 0.
template <class Int>
struct Exact {
  enum class Kind { Zero, NotReal, Value } kind = Kind::Zero;
  Dyadic<Int> num;
  Dyadic<Int> den{1, 0};

  int sign() const { return kind == Kind::Value ? num.mant.sign() : 0; }
  Exact magnitude() const
  {
    Exact r = *this;
    if (r.num.mant < 0) r.num.mant = -r.num.mant;
    return r;
  }
};

template <class Int>
Exact<Int> not_real()
{
  Exact<Int> e;
  e.kind = Exact<Int>::Kind::NotReal;
  return e;
}

template <class Int>
Exact<Int> from_dyadic(const Dyadic<Int>& d)
{
  Exact<Int> e;
  if (d.mant != 0) {
    e.kind = Exact<Int>::Kind::Value;
    e.num = d;
  }
  return e;
}

template <class Int>
Exact<Int> quotient(const Dyadic<Int>& n, const Dyadic<Int>& d)
{
  Exact<Int> e = from_dyadic(n);
  if (e.kind != Exact<Int>::Kind::Value) return e;
  e.den = d;
  if (d.mant < 0) {
    e.den.mant = -e.den.mant;
    e.num.mant = -e.num.mant;
  }
  return e;
}

template <class Int>
int compare(const Exact<Int>& x, const Dyadic<Int>& m)
{
  if (x.den.mant == 1) return compare(x.num, Dyadic<Int>{m.mant, m.exp + x.den.exp});
  return compare(x.num, mul(m, x.den));
}

// ---------------------------------------------------------------- posits

// Value of an n-bit posit read straight off its bit string (n <= 33).
template <class Int>
std::optional<Dyadic<Int>> posit_value(std::uint64_t bits, int n, int es)
{
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  bits &= mask;
  if (bits == 0) return Dyadic<Int>{0, 0};
  const std::uint64_t sign_bit = std::uint64_t{1} << (n - 1);
  if (bits == sign_bit) return std::nullopt;
  if (bits & sign_bit) return negate(*posit_value<Int>((~bits + 1) & mask, n, es));

  std::vector<int> body;
  for (int i = n - 2; i >= 0; --i) body.push_back(static_cast<int>((bits >> i) & 1u));

  std::size_t i = 0;
  const int lead = body[0];
  long run = 0;
  while (i < body.size() && body[i] == lead) {
    ++run;
    ++i;
  }
  const long k = lead == 1 ? run - 1 : -run;
  ++i;  // terminating bit, if present

  long e = 0;
  for (int j = 0; j < es; ++j) {
    e = 2 * e + (i < body.size() ? body[i] : 0);
    ++i;
  }
  Int significand = 1;
  long fraction_bits = 0;
  for (; i < body.size(); ++i) {
    significand = 2 * significand + body[i];
    ++fraction_bits;
  }
  return Dyadic<Int>{significand, k * (1L << es) + e - fraction_bits};
}

// Pattern values and rounding boundaries, memoised for narrow formats. The
// boundary between positive patterns q and q + 1 is the (n+1)-bit posit
// halfway between them in pattern space.
template <class Int>
class PositOracle {
 public:
  explicit PositOracle(PositConfig cfg, bool memoise) : cfg_(cfg)
  {
    if (!memoise || cfg.n() > 16) return;
    const std::uint32_t count = std::uint32_t{1} << cfg.n();
    values_.reserve(count);
    boundaries_.reserve(count / 2);
    for (std::uint32_t bits = 0; bits < count; ++bits) values_.push_back(posit_value<Int>(bits, cfg.n(), cfg.es()));
    for (std::uint32_t q = 0; q < count / 2; ++q) boundaries_.push_back(boundary_uncached(q));
  }

  std::optional<Dyadic<Int>> value(std::uint32_t bits) const
  {
    if (!values_.empty()) return values_[bits];
    return posit_value<Int>(bits, cfg_.n(), cfg_.es());
  }

  const Dyadic<Int>& boundary(std::uint32_t q, Dyadic<Int>& scratch) const
  {
    if (!boundaries_.empty()) return boundaries_[q];
    scratch = boundary_uncached(q);
    return scratch;
  }

  Exact<Int> exact(Op op, std::uint32_t a, std::uint32_t b) const
  {
    const auto va = value(a);
    const auto vb = value(b);
    if (!va || !vb) return not_real<Int>();
    switch (op) {
      case Op::Add: return from_dyadic(add(*va, *vb));
      case Op::Sub: return from_dyadic(add(*va, negate(*vb)));
      case Op::Mul: return from_dyadic(mul(*va, *vb));
      case Op::Div:
        if (vb->mant == 0) return not_real<Int>();
        return quotient(*va, *vb);
    }
    return not_real<Int>();
  }

  std::uint32_t round_positive(const Exact<Int>& x) const
  {
    Dyadic<Int> scratch;
    std::uint32_t lo = 1;
    std::uint32_t hi = cfg_.maxpos_bits();
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      if (compare(x, boundary(mid, scratch)) < 0) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    std::uint32_t p = lo;
    if (p > 1 && compare(x, boundary(p - 1, scratch)) == 0 && (p % 2 == 1)) p -= 1;
    return p;
  }

  std::uint32_t result(Op op, std::uint32_t a, std::uint32_t b) const
  {
    const Exact<Int> x = exact(op, a, b);
    switch (x.kind) {
      case Exact<Int>::Kind::Zero: return 0;
      case Exact<Int>::Kind::NotReal: return cfg_.nar_bits();
      case Exact<Int>::Kind::Value: break;
    }
    const std::uint32_t mag = round_positive(x.magnitude());
    return x.sign() < 0 ? (0u - mag) & cfg_.mask() : mag;
  }

  // Checks `result` against its two neighbouring boundaries only.
  bool accepts(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t result) const
  {
    const Exact<Int> x = exact(op, a, b);
    switch (x.kind) {
      case Exact<Int>::Kind::Zero: return result == 0;
      case Exact<Int>::Kind::NotReal: return result == cfg_.nar_bits();
      case Exact<Int>::Kind::Value: break;
    }
    if (result == 0 || result == cfg_.nar_bits()) return false;
    const bool result_negative = (result >> (cfg_.n() - 1)) & 1u;
    if (result_negative != (x.sign() < 0)) return false;
    const std::uint32_t p = result_negative ? (0u - result) & cfg_.mask() : result;
    const Exact<Int> m = x.magnitude();
    Dyadic<Int> scratch;
    if (p > 1) {
      const int c = compare(m, boundary(p - 1, scratch));
      if (c < 0 || (c == 0 && p % 2 == 1)) return false;
    }
    if (p < cfg_.maxpos_bits()) {
      const int c = compare(m, boundary(p, scratch));
      if (c > 0 || (c == 0 && p % 2 == 1)) return false;
    }
    return true;
  }

 private:
  Dyadic<Int> boundary_uncached(std::uint32_t q) const
  {
    return *posit_value<Int>(2 * std::uint64_t{q} + 1, cfg_.n() + 1, cfg_.es());
  }

  PositConfig cfg_;
  std::vector<std::optional<Dyadic<Int>>> values_;
  std::vector<Dyadic<Int>> boundaries_;
};

// Runs `f` with an integer type wide enough for every intermediate: products
// and cross-multiplied quotients span at most about four times the scale range.
template <class F>
decltype(auto) with_integer(PositConfig cfg, F&& f)
{
  if (4 * (cfg.max_scale() + cfg.n()) + 64 <= 512) return f(std::type_identity<Int512>{});
  return f(std::type_identity<cpp_int>{});
}

std::uint32_t posit_impl(Op op, std::uint32_t a, std::uint32_t b, PositConfig cfg)
{
  const auto pa = PositValue::from_bits(a, cfg);
  const auto pb = PositValue::from_bits(b, cfg);
  switch (op) {
    case Op::Add: return posit_add(pa, pb).bits;
    case Op::Sub: return posit_sub(pa, pb).bits;
    case Op::Mul: return posit_mul(pa, pb).bits;
    case Op::Div: return posit_div(pa, pb).bits;
  }
  return 0;
}

// ---------------------------------------------------------------- binary16

constexpr std::uint16_t kF16Inf = 0x7C00;
constexpr std::uint16_t kF16NaN = 0x7E00;

using D16 = Dyadic<Int256>;
using E16 = Exact<Int256>;

// Positive pattern values, with the infinity pattern standing for 2^16 so
// that the overflow threshold falls out as an ordinary midpoint.
D16 f16_positive_value(std::uint16_t q)
{
  if (q == kF16Inf) return {1, 16};
  const long e = (q >> 10) & 0x1F;
  const long f = q & 0x3FF;
  if (e == 0) return {f, -24};
  return {1024 + f, e - 25};
}

std::optional<D16> f16_value(std::uint16_t bits)
{
  if (((bits >> 10) & 0x1F) == 0x1F) return std::nullopt;
  const D16 mag = f16_positive_value(bits & 0x7FFF);
  return (bits & 0x8000) ? negate(mag) : mag;
}

D16 f16_midpoint(std::uint16_t q)
{
  D16 s = add(f16_positive_value(q), f16_positive_value(static_cast<std::uint16_t>(q + 1)));
  s.exp -= 1;
  return s;
}

std::uint16_t round_positive_f16(const E16& x)
{
  std::uint32_t lo = 0;
  std::uint32_t hi = kF16Inf;
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (compare(x, f16_midpoint(static_cast<std::uint16_t>(mid))) < 0) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::uint32_t q = lo;
  if (q > 0 && compare(x, f16_midpoint(static_cast<std::uint16_t>(q - 1))) == 0 && (q % 2 == 1)) q -= 1;
  return static_cast<std::uint16_t>(q);
}

std::uint16_t round_f16(const E16& x)
{
  const std::uint16_t sign = x.sign() < 0 ? 0x8000 : 0;
  return static_cast<std::uint16_t>(sign | round_positive_f16(x.magnitude()));
}

bool f16_is_nan(std::uint16_t v) { return (v & 0x7C00) == 0x7C00 && (v & 0x3FF) != 0; }
bool f16_is_inf(std::uint16_t v) { return (v & 0x7FFF) == kF16Inf; }
bool f16_is_zero(std::uint16_t v) { return (v & 0x7FFF) == 0; }
std::uint16_t f16_sign(std::uint16_t v) { return v & 0x8000; }

std::uint16_t f16_impl(Op op, std::uint16_t a, std::uint16_t b)
{
  const auto fa = Binary16::from_bits(a);
  const auto fb = Binary16::from_bits(b);
  switch (op) {
    case Op::Add: return f16_add(fa, fb).bits;
    case Op::Sub: return f16_sub(fa, fb).bits;
    case Op::Mul: return f16_mul(fa, fb).bits;
    case Op::Div: return f16_div(fa, fb).bits;
  }
  return 0;
}

void tally(ConformanceReport& report, Op op, std::uint32_t a, std::uint32_t b, std::uint32_t expected,
           std::uint32_t actual, std::size_t max_dump)
{
  auto& t = report.ops[static_cast<std::size_t>(op)];
  ++t.checked;
  if (expected == actual) return;
  ++t.mismatches;
  if (report.dump.size() < max_dump) report.dump.push_back({op, a, b, expected, actual});
}

template <class Int>
void check_posit_pair(ConformanceReport& report, const PositOracle<Int>& oracle, std::uint32_t a, std::uint32_t b,
                      PositConfig cfg, std::size_t max_dump)
{
  for (Op op : kAllOps) {
    const std::uint32_t actual = posit_impl(op, a, b, cfg);
    auto& t = report.ops[static_cast<std::size_t>(op)];
    if (oracle.accepts(op, a, b, actual)) {
      ++t.checked;
      continue;
    }
    tally(report, op, a, b, oracle.result(op, a, b), actual, max_dump);
  }
}

std::string posit_name(PositConfig cfg)
{
  return "posit" + std::to_string(cfg.n()) + "," + std::to_string(cfg.es());
}

}  // namespace

const char* op_name(Op op) noexcept
{
  switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
  }
  return "?";
}

std::uint64_t ConformanceReport::checked() const noexcept
{
  std::uint64_t s = 0;
  for (const auto& t : ops) s += t.checked;
  return s;
}

std::uint64_t ConformanceReport::mismatches() const noexcept
{
  std::uint64_t s = 0;
  for (const auto& t : ops) s += t.mismatches;
  return s;
}

std::uint32_t oracle_posit(Op op, std::uint32_t a, std::uint32_t b, PositConfig cfg)
{
  return with_integer(cfg, [&]<class Int>(std::type_identity<Int>) {
    return PositOracle<Int>(cfg, false).result(op, a, b);
  });
}

bool oracle_posit_accepts(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t result, PositConfig cfg)
{
  return with_integer(cfg, [&]<class Int>(std::type_identity<Int>) {
    return PositOracle<Int>(cfg, false).accepts(op, a, b, result);
  });
}

std::uint16_t oracle_binary16(Op op, std::uint16_t a, std::uint16_t b)
{
  if (f16_is_nan(a) || f16_is_nan(b)) return kF16NaN;
  if (op == Op::Sub) {
    return oracle_binary16(Op::Add, a, static_cast<std::uint16_t>(b ^ 0x8000));
  }
  const std::uint16_t xor_sign = f16_sign(a) ^ f16_sign(b);
  switch (op) {
    case Op::Add: {
      if (f16_is_inf(a) && f16_is_inf(b)) return f16_sign(a) == f16_sign(b) ? a : kF16NaN;
      if (f16_is_inf(a)) return a;
      if (f16_is_inf(b)) return b;
      const E16 x = from_dyadic(add(*f16_value(a), *f16_value(b)));
      if (x.kind == E16::Kind::Zero) {
        // Both-zero sums keep a shared sign; any other exact zero is +0.
        if (f16_is_zero(a) && f16_is_zero(b)) return f16_sign(a) & f16_sign(b);
        return 0;
      }
      return round_f16(x);
    }
    case Op::Mul: {
      if (f16_is_inf(a) || f16_is_inf(b)) {
        if (f16_is_zero(a) || f16_is_zero(b)) return kF16NaN;
        return static_cast<std::uint16_t>(xor_sign | kF16Inf);
      }
      if (f16_is_zero(a) || f16_is_zero(b)) return xor_sign;
      return round_f16(from_dyadic(mul(*f16_value(a), *f16_value(b))));
    }
    case Op::Div: {
      if (f16_is_inf(a)) return f16_is_inf(b) ? kF16NaN : static_cast<std::uint16_t>(xor_sign | kF16Inf);
      if (f16_is_inf(b)) return xor_sign;
      if (f16_is_zero(b)) return f16_is_zero(a) ? kF16NaN : static_cast<std::uint16_t>(xor_sign | kF16Inf);
      if (f16_is_zero(a)) return xor_sign;
      const E16 x = quotient(*f16_value(a), *f16_value(b));
      const std::uint16_t r = round_f16(x);
      return r;
    }
    case Op::Sub: break;
  }
  return kF16NaN;
}

std::vector<std::uint32_t> posit_corner_patterns(PositConfig cfg)
{
  const std::uint32_t one = static_cast<std::uint32_t>(std::uint64_t{1} << (cfg.n() - 2));
  const std::vector<std::uint32_t> positive{cfg.minpos_bits(), cfg.maxpos_bits(), one, one + 1, one - 1};
  std::vector<std::uint32_t> out{0, cfg.nar_bits()};
  for (auto p : positive) {
    out.push_back(p);
    out.push_back((0u - p) & cfg.mask());
  }
  return out;
}

std::vector<std::uint16_t> binary16_basis()
{
  constexpr std::uint16_t fractions[] = {0x000, 0x001, 0x002, 0x155, 0x200, 0x2AA, 0x3FE, 0x3FF};
  std::vector<std::uint16_t> out;
  out.reserve(512);
  for (std::uint16_t sign : {std::uint16_t{0}, std::uint16_t{0x8000}}) {
    for (std::uint16_t e = 0; e < 32; ++e) {
      for (auto f : fractions) out.push_back(static_cast<std::uint16_t>(sign | (e << 10) | f));
    }
  }
  return out;
}

ConformanceReport verify_posit_exhaustive(PositConfig cfg, std::size_t max_dump)
{
  if (cfg.n() > 12) throw std::invalid_argument("exhaustive verification is limited to n <= 12");
  ConformanceReport report{posit_name(cfg), "exhaustive", {}, {}};
  const std::uint32_t patterns = std::uint32_t{1} << cfg.n();
  with_integer(cfg, [&]<class Int>(std::type_identity<Int>) {
    const PositOracle<Int> oracle(cfg, true);
    for (std::uint32_t a = 0; a < patterns; ++a) {
      for (std::uint32_t b = 0; b < patterns; ++b) check_posit_pair(report, oracle, a, b, cfg, max_dump);
    }
  });
  return report;
}

ConformanceReport verify_posit_sampled(PositConfig cfg, std::uint64_t pairs, std::uint64_t seed,
                                       std::size_t max_dump)
{
  ConformanceReport report{posit_name(cfg), "sampled", {}, {}};
  const auto corners = posit_corner_patterns(cfg);
  with_integer(cfg, [&]<class Int>(std::type_identity<Int>) {
    const PositOracle<Int> oracle(cfg, true);
    for (auto a : corners) {
      for (auto b : corners) check_posit_pair(report, oracle, a, b, cfg, max_dump);
    }
    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < pairs; ++i) {
      const auto a = static_cast<std::uint32_t>(rng()) & cfg.mask();
      const auto b = static_cast<std::uint32_t>(rng()) & cfg.mask();
      check_posit_pair(report, oracle, a, b, cfg, max_dump);
    }
  });
  return report;
}

ConformanceReport verify_binary16_basis(std::size_t max_dump)
{
  ConformanceReport report{"float16", "basis", {}, {}};
  const auto basis = binary16_basis();
  for (auto a : basis) {
    for (auto b : basis) {
      for (Op op : kAllOps) tally(report, op, a, b, oracle_binary16(op, a, b), f16_impl(op, a, b), max_dump);
    }
  }
  return report;
}

ConformanceReport verify_binary16_sampled(std::uint64_t pairs, std::uint64_t seed, std::size_t max_dump)
{
  ConformanceReport report{"float16", "sampled", {}, {}};
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < pairs; ++i) {
    const auto a = static_cast<std::uint16_t>(rng());
    const auto b = static_cast<std::uint16_t>(rng());
    for (Op op : kAllOps) tally(report, op, a, b, oracle_binary16(op, a, b), f16_impl(op, a, b), max_dump);
  }
  return report;
}

}  // namespace tapered::conformance
