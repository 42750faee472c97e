#pragma once

// The interval abstract domain over machine integers: inclusion lattice,
// widening with thresholds, overflow-aware forward operators and backward
// (refining) operators for all seven IMP operations.
//
// Intervals are always bounded by the width's extremes; there is no +/-oo.
// Any bound computation that leaves the representable range falls back to
// top (arithmetic) or Bot (empty constructions), keeping every operator
// total and sound under wrapping concrete semantics.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absint/domain_core.hpp"
#include "absint/machine_int.hpp"

namespace absint {

/// Bot, or a pair low <= up of machine integers.
class Itv {
public:
  static Itv bottom() { return Itv(); }

  static Itv val(IntM low, IntM up) {
    assert(low.width() == up.width());
    assert(low.value() <= up.value());
    Itv r;
    r.low_ = low.value();
    r.up_ = up.value();
    r.bot_ = false;
    return r;
  }

  /// Bot unless both bounds are inbounds and low <= up.
  static Itv make(i128 low, i128 up, Width w) {
    if (inbounds(low, w) && inbounds(up, w) && low <= up)
      return val(IntM(std::int64_t(low), w), IntM(std::int64_t(up), w));
    return bottom();
  }

  bool is_bottom() const { return bot_; }
  std::int64_t low() const {
    assert(!bot_);
    return low_;
  }
  std::int64_t up() const {
    assert(!bot_);
    return up_;
  }

  bool operator==(const Itv& o) const {
    if (bot_ || o.bot_) return bot_ == o.bot_;
    return low_ == o.low_ && up_ == o.up_;
  }
  bool operator!=(const Itv& o) const { return !(*this == o); }

  std::string str() const {
    if (bot_) return "bot";
    return "[" + std::to_string(low_) + ", " + std::to_string(up_) + "]";
  }

private:
  Itv() = default;

  std::int64_t low_ = 0;
  std::int64_t up_ = 0;
  bool bot_ = true;
};

/// Three-valued truth read off an abstract value: TT definitely nonzero,
/// FF definitely zero (or unreachable), Unk either way.
enum class UBool { Unk, TT, FF };

/// Widening jump targets: strictly increasing, always bracketed by the
/// width's minimum and maximum.
class Thresholds {
public:
  static Thresholds standard(Width w) {
    static const std::int64_t ladder[] = {-64, -32, -16, -8, -4, 4, 8, 16, 32, 64};
    std::vector<std::int64_t> vs(std::begin(ladder), std::end(ladder));
    return normalized(std::move(vs), w);
  }

  static Thresholds normalized(std::vector<std::int64_t> vs, Width w) {
    vs.push_back(w.min_value());
    vs.push_back(w.max_value());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    std::erase_if(vs, [&](std::int64_t v) { return !inbounds(v, w); });
    Thresholds t;
    t.values_ = std::move(vs);
    return t;
  }

  const std::vector<std::int64_t>& values() const { return values_; }

  /// Smallest threshold strictly above b; requires b < max.
  std::int64_t next_above(std::int64_t b) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), b);
    assert(it != values_.end());
    return *it;
  }

  /// Largest threshold strictly below b; requires b > min.
  std::int64_t next_below(std::int64_t b) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), b);
    assert(it != values_.begin());
    return *(it - 1);
  }

private:
  std::vector<std::int64_t> values_;
};

class IntervalDomain {
public:
  using Value = Itv;
  using Concrete = IntM;

  explicit IntervalDomain(Width w) : IntervalDomain(w, Thresholds::standard(w)) {}
  IntervalDomain(Width w, Thresholds t, Mutations mut = {})
      : width_(w), thresholds_(std::move(t)), mut_(mut) {}

  Width width() const { return width_; }
  const Thresholds& thresholds() const { return thresholds_; }

  // -- lattice ---------------------------------------------------------

  bool leq(const Itv& x, const Itv& y) const {
    if (x.is_bottom()) return true;
    if (y.is_bottom()) return false;
    return x.low() >= y.low() && x.up() <= y.up();
  }

  Itv join(const Itv& x, const Itv& y) const {
    if (x.is_bottom()) return y;
    if (y.is_bottom()) return x;
    return Itv::val(IntM(std::min(x.low(), y.low()), width_),
                    IntM(std::max(x.up(), y.up()), width_));
  }

  Itv meet(const Itv& x, const Itv& y) const {
    if (mut_.meet_returns_join) return join(x, y);
    if (x.is_bottom() || y.is_bottom()) return Itv::bottom();
    return Itv::make(std::max(x.low(), y.low()), std::min(x.up(), y.up()), width_);
  }

  Itv bottom() const { return Itv::bottom(); }
  Itv top() const { return Itv::make(width_.min_value(), width_.max_value(), width_); }

  Itv widen(const Itv& x, const Itv& y) const {
    if (mut_.widen_returns_meet) return meet(x, y);
    if (x.is_bottom()) return y;
    if (y.is_bottom()) return x;
    const std::int64_t lo = x.low() <= y.low() ? x.low() : widen_bound_down(y.low());
    const std::int64_t hi = x.up() >= y.up() ? x.up() : widen_bound_up(y.up());
    return Itv::val(IntM(lo, width_), IntM(hi, width_));
  }

  // -- abstract domain --------------------------------------------------

  bool contains(const Itv& x, IntM v) const {
    if (x.is_bottom()) return false;
    return x.low() <= v.value() && v.value() <= x.up();
  }

  Nat card(const Itv& x) const {
    if (x.is_bottom()) return 0;
    return Nat(i128(x.up()) - i128(x.low()) + 1);
  }

  Measure<Itv> measure() const {
    return Measure<Itv>{[*this](const Itv& x) { return card(x); }, width_.value_count() + 1};
  }

  // -- numeric domain ---------------------------------------------------

  Itv constant(IntM v) const { return Itv::val(v, v); }
  Itv constant(std::int64_t v) const { return constant(IntM(v, width_)); }

  Itv positive() const { return Itv::make(1, width_.max_value(), width_); }
  Itv negative() const { return Itv::make(width_.min_value(), -1, width_); }

  UBool as_bool(const Itv& x) const {
    if (x.is_bottom() || x == constant(std::int64_t(0))) return UBool::FF;
    if (contains(x, IntM(0, width_))) return UBool::Unk;
    return UBool::TT;
  }

  /// Interval of negated values. Negating the width's minimum wraps onto
  /// itself, so an interval touching it can only be approximated by top.
  Itv negate(const Itv& x) const {
    if (x.is_bottom()) return x;
    if (!mut_.negate_skips_min_guard && x.low() == width_.min_value()) return top();
    return Itv::make(-i128(x.up()), -i128(x.low()), width_);
  }

  /// Sound over-approximation of set difference: trims a covered prefix or
  /// suffix of x; interior holes are not representable, so x is kept.
  Itv difference(const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return x;
    const i128 a = x.low(), b = x.up(), c = y.low(), d = y.up();
    if (c <= a && b <= d) return Itv::bottom();
    if (c <= a && a <= d) return Itv::make(d + 1, b, width_);
    if (c <= b && b <= d) return Itv::make(a, c - 1, width_);
    return x;
  }

  Itv forward(BinOpKind op, const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return Itv::bottom();
    switch (op) {
      case BinOpKind::Plus: return add(x, y);
      case BinOpKind::Minus: return add(x, negate(y));
      case BinOpKind::Mult: return mul(x, y);
      case BinOpKind::Eq: {
        if (x.low() == x.up() && y.low() == y.up() && x.low() == y.low())
          return constant(std::int64_t(1));
        if (meet(x, y).is_bottom()) return constant(std::int64_t(0));
        return Itv::make(0, 1, width_);
      }
      case BinOpKind::Lt: {
        if (x.up() < y.low()) return constant(std::int64_t(1));
        if (x.low() >= y.up()) return constant(std::int64_t(0));
        return Itv::make(0, 1, width_);
      }
      case BinOpKind::And: {
        const UBool bx = as_bool(x), by = as_bool(y);
        if (bx == UBool::TT && by == UBool::TT) return constant(std::int64_t(1));
        if (bx == UBool::FF || by == UBool::FF) return constant(std::int64_t(0));
        return Itv::make(0, 1, width_);
      }
      case BinOpKind::Or: {
        const UBool bx = as_bool(x), by = as_bool(y);
        if (bx == UBool::TT || by == UBool::TT) return constant(std::int64_t(1));
        if (bx == UBool::FF && by == UBool::FF) return constant(std::int64_t(0));
        return Itv::make(0, 1, width_);
      }
    }
    throw std::logic_error("forward: bad operator");
  }

  std::pair<Itv, Itv> backward(BinOpKind op, const Itv& x, const Itv& y, const Itv& r) const {
    switch (op) {
      case BinOpKind::Plus:
        return {meet(x, forward_sub(r, y)), meet(y, forward_sub(r, x))};
      case BinOpKind::Minus:
        return {meet(x, forward_add(r, y)), meet(y, forward_sub(x, r))};
      case BinOpKind::Mult: {
        auto refine_by_unit = [&](const Itv& i, const Itv& j) {
          return j == constant(std::int64_t(1)) ? meet(i, r) : i;
        };
        return {refine_by_unit(x, y), refine_by_unit(y, x)};
      }
      case BinOpKind::Eq: {
        if (as_bool(r) == UBool::TT) {
          Itv both = meet(x, y);
          return {both, both};
        }
        return {x, y};
      }
      case BinOpKind::Lt: return backward_lt(x, y, r);
      case BinOpKind::And: {
        const UBool br = as_bool(r), bx = as_bool(x), by = as_bool(y);
        const Itv zero = constant(std::int64_t(0));
        if (br == UBool::FF && bx == UBool::TT) return {x, meet(y, zero)};
        if (br == UBool::FF && by == UBool::TT) return {meet(x, zero), y};
        if (br == UBool::TT) return {difference(x, zero), difference(y, zero)};
        return {x, y};
      }
      case BinOpKind::Or: {
        const UBool br = as_bool(r), bx = as_bool(x), by = as_bool(y);
        const Itv zero = constant(std::int64_t(0));
        if (br == UBool::TT && bx == UBool::FF && (by == UBool::Unk || by == UBool::FF))
          return {x, difference(y, zero)};
        if (br == UBool::TT && bx == UBool::Unk && by == UBool::FF)
          return {difference(x, zero), y};
        if (br == UBool::FF && (by == UBool::TT || bx == UBool::TT))
          return {meet(x, zero), meet(y, zero)};
        return {x, y};
      }
    }
    throw std::logic_error("backward: bad operator");
  }

private:
  std::int64_t widen_bound_up(std::int64_t b) const {
    return b == width_.max_value() ? b : thresholds_.next_above(b);
  }
  std::int64_t widen_bound_down(std::int64_t b) const {
    return b == width_.min_value() ? b : thresholds_.next_below(b);
  }

  Itv forward_add(const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return Itv::bottom();
    return add(x, y);
  }
  Itv forward_sub(const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return Itv::bottom();
    return add(x, negate(y));
  }

  Itv add(const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return Itv::bottom();
    const IntM a(x.low(), width_), b(x.up(), width_);
    const IntM c(y.low(), width_), d(y.up(), width_);
    if (add_overflows(a, c) || add_overflows(b, d)) return top();
    return Itv::make(i128(x.low()) + i128(y.low()), i128(x.up()) + i128(y.up()), width_);
  }

  Itv mul(const Itv& x, const Itv& y) const {
    const IntM a(x.low(), width_), b(x.up(), width_);
    const IntM c(y.low(), width_), d(y.up(), width_);
    if (mul_overflows(a, c) || mul_overflows(a, d) || mul_overflows(b, c) || mul_overflows(b, d))
      return top();
    const i128 corners[4] = {i128(x.low()) * y.low(), i128(x.low()) * y.up(),
                             i128(x.up()) * y.low(), i128(x.up()) * y.up()};
    return Itv::make(*std::min_element(corners, corners + 4),
                     *std::max_element(corners, corners + 4), width_);
  }

  /// Refine x and y under "x < y is true".
  std::pair<Itv, Itv> backward_lt_true(const Itv& x, const Itv& y) const {
    if (x.is_bottom() || y.is_bottom()) return {x, y};
    const i128 a = x.low(), b = x.up(), c = y.low(), d = y.up();
    return {Itv::make(a, std::min(b, d - 1), width_), Itv::make(std::max(a + 1, c), d, width_)};
  }

  bool incrementable(const Itv& i) const {
    return !i.is_bottom() && i.up() < width_.max_value();
  }
  bool decrementable(const Itv& i) const {
    return !i.is_bottom() && i.low() > width_.min_value();
  }

  std::pair<Itv, Itv> backward_lt(const Itv& x, const Itv& y, const Itv& r) const {
    const Itv one = constant(std::int64_t(1));
    switch (as_bool(r)) {
      case UBool::TT: return backward_lt_true(x, y);
      case UBool::FF:
        // not (x < y), i.e. y <= x: either y < x+1 or y-1 < x, whichever
        // rewrite stays in range.
        if (incrementable(x) || mut_.backward_lt_skips_increment_guard) {
          auto [ry, rx] = backward_lt_true(y, forward_add(x, one));
          return {forward_sub(rx, one), ry};
        }
        if (decrementable(y)) {
          auto [ry, rx] = backward_lt_true(forward_sub(y, one), x);
          return {rx, forward_add(ry, one)};
        }
        return {x, y};
      case UBool::Unk: return {x, y};
    }
    return {x, y};
  }

  Width width_;
  Thresholds thresholds_;
  Mutations mut_;
};

static_assert(NumDomain<IntervalDomain>);

}  // namespace absint
