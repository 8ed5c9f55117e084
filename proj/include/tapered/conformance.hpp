#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tapered/posit.hpp"

namespace tapered::conformance {

enum class Op : std::uint8_t { Add, Sub, Mul, Div };

constexpr std::array<Op, 4> kAllOps{Op::Add, Op::Sub, Op::Mul, Op::Div};

const char* op_name(Op op) noexcept;

struct Mismatch {
  Op op;
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t expected;
  std::uint32_t actual;
};

struct OpTally {
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
};

struct ConformanceReport {
  std::string format;
  std::string mode;
  std::array<OpTally, 4> ops{};
  std::vector<Mismatch> dump;  ///< first mismatches, capped

  std::uint64_t checked() const noexcept;
  std::uint64_t mismatches() const noexcept;
  bool passed() const noexcept { return mismatches() == 0; }
};

// Exact-rational reference results. Nothing here calls the arithmetic under
// test: values are rebuilt from the bit strings and rounded by locating the
// exact result between neighbouring patterns.

/// Correctly rounded posit result of `op` on two patterns.
std::uint32_t oracle_posit(Op op, std::uint32_t a, std::uint32_t b, PositConfig cfg);
/// True iff `result` is the correctly rounded posit result.
bool oracle_posit_accepts(Op op, std::uint32_t a, std::uint32_t b, std::uint32_t result, PositConfig cfg);
/// Correctly rounded binary16 result (canonical NaN 0x7E00).
std::uint16_t oracle_binary16(Op op, std::uint16_t a, std::uint16_t b);

/// {0, NaR, +-minpos, +-maxpos, +-1, +-(1 + ulp), +-(1 - ulp)}.
std::vector<std::uint32_t> posit_corner_patterns(PositConfig cfg);
/// 512 patterns: 8 fractions for every (sign, exponent field), covering
/// zeros, subnormals, infinities and NaNs.
std::vector<std::uint16_t> binary16_basis();

ConformanceReport verify_posit_exhaustive(PositConfig cfg, std::size_t max_dump = 20);
ConformanceReport verify_posit_sampled(PositConfig cfg, std::uint64_t pairs, std::uint64_t seed,
                                       std::size_t max_dump = 20);
ConformanceReport verify_binary16_basis(std::size_t max_dump = 20);
ConformanceReport verify_binary16_sampled(std::uint64_t pairs, std::uint64_t seed, std::size_t max_dump = 20);

}  // namespace tapered::conformance
