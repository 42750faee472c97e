#pragma once

// Fixed-width two's-complement machine integers with wrap-on-overflow
// arithmetic, plus the seven concrete binary operations of IMP.
//
// The bit width is a runtime parameter (2..64). All arithmetic that could
// exceed 64 bits is done in 128-bit scratch registers, so overflow
// predicates can compare wrapped results against exact ones.

#include <array>
#include <cassert>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace absint {

using i128 = __int128;
using u128 = unsigned __int128;

// Measure values (cardinalities, iteration bounds). 2^64 + 1 must be
// representable, so 64 bits are not enough.
using Nat = unsigned __int128;

inline std::string to_string_i128(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? u128(-(v + 1)) + 1 : u128(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return std::string(digits.rbegin(), digits.rend());
}

/// Bit width of the machine integers, 2..64.
class Width {
public:
  explicit Width(int bits) : bits_(bits) {
    if (bits < 2 || bits > 64)
      throw std::invalid_argument("Width: bits must be in 2..64, got " +
                                  std::to_string(bits));
  }

  int bits() const { return bits_; }

  std::int64_t min_value() const {
    return bits_ == 64 ? std::numeric_limits<std::int64_t>::min()
                       : -(std::int64_t(1) << (bits_ - 1));
  }

  std::int64_t max_value() const {
    return bits_ == 64 ? std::numeric_limits<std::int64_t>::max()
                       : (std::int64_t(1) << (bits_ - 1)) - 1;
  }

  /// Number of representable values, 2^bits.
  Nat value_count() const { return Nat(1) << bits_; }

  bool operator==(const Width& o) const { return bits_ == o.bits_; }
  bool operator!=(const Width& o) const { return bits_ != o.bits_; }

private:
  int bits_;
};

/// True iff x fits the signed range of width w.
inline bool inbounds(i128 x, Width w) {
  return x >= i128(w.min_value()) && x <= i128(w.max_value());
}

/// A machine integer: a value guaranteed to be inbounds for its width.
class IntM {
public:
  IntM(std::int64_t value, Width width) : value_(value), width_(width) {
    if (!inbounds(value, width))
      throw std::out_of_range("IntM: " + std::to_string(value) +
                              " does not fit width " +
                              std::to_string(width.bits()));
  }

  /// Reduce an arbitrary integer modulo 2^bits into the signed range.
  static IntM wrap(i128 x, Width w) {
    const int bits = w.bits();
    const u128 mask = (u128(1) << bits) - 1;
    u128 r = u128(x) & mask;
    std::int64_t v;
    if (r > u128(w.max_value()))
      v = std::int64_t(i128(r) - (i128(1) << bits));
    else
      v = std::int64_t(r);
    return IntM(v, w);
  }

  std::int64_t value() const { return value_; }
  Width width() const { return width_; }

  bool operator==(const IntM& o) const {
    return width_ == o.width_ && value_ == o.value_;
  }
  bool operator!=(const IntM& o) const { return !(*this == o); }
  bool operator<(const IntM& o) const {
    assert(width_ == o.width_);
    return value_ < o.value_;
  }
  bool operator<=(const IntM& o) const {
    assert(width_ == o.width_);
    return value_ <= o.value_;
  }

private:
  std::int64_t value_;
  Width width_;
};

enum class BinOpKind { Plus, Minus, Mult, Eq, Lt, And, Or };

inline constexpr std::array<BinOpKind, 7> all_binops = {
    BinOpKind::Plus, BinOpKind::Minus, BinOpKind::Mult, BinOpKind::Eq,
    BinOpKind::Lt,   BinOpKind::And,   BinOpKind::Or};

inline const char* binop_symbol(BinOpKind op) {
  switch (op) {
    case BinOpKind::Plus: return "+";
    case BinOpKind::Minus: return "-";
    case BinOpKind::Mult: return "*";
    case BinOpKind::Eq: return "==";
    case BinOpKind::Lt: return "<";
    case BinOpKind::And: return "&&";
    case BinOpKind::Or: return "||";
  }
  return "?";
}

/// The concrete meaning of each syntactic operator. Plus/Minus/Mult wrap on
/// overflow; the comparisons and logical operators return 0/1-valued
/// machine integers (0 encodes false).
inline IntM concrete_binop(BinOpKind op, IntM a, IntM b) {
  assert(a.width() == b.width());
  const Width w = a.width();
  const i128 x = a.value();
  const i128 y = b.value();
  auto boolean = [&](bool v) { return IntM(v ? 1 : 0, w); };
  switch (op) {
    case BinOpKind::Plus: return IntM::wrap(x + y, w);
    case BinOpKind::Minus: return IntM::wrap(x - y, w);
    case BinOpKind::Mult: return IntM::wrap(x * y, w);
    case BinOpKind::Eq: return boolean(x == y);
    case BinOpKind::Lt: return boolean(x < y);
    case BinOpKind::And: return boolean(x != 0 && y != 0);
    case BinOpKind::Or: return boolean(x != 0 || y != 0);
  }
  throw std::logic_error("concrete_binop: bad operator");
}

/// True iff the exact sum a+b differs from the wrapped sum.
inline bool add_overflows(IntM a, IntM b) {
  assert(a.width() == b.width());
  return !inbounds(i128(a.value()) + i128(b.value()), a.width());
}

/// True iff the exact product a*b is out of the width's range.
inline bool mul_overflows(IntM a, IntM b) {
  assert(a.width() == b.width());
  return !inbounds(i128(a.value()) * i128(b.value()), a.width());
}

}  // namespace absint
