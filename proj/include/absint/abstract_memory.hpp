#pragma once

// Weakly-relational abstract memory over any numeric abstract domain: a
// per-variable map whose only cross-variable interaction is the reduction
// of the whole memory to Bot as soon as one entry becomes empty.
//
// Provides the memory lattice/domain instance, forward abstract evaluation
// of expressions, backward refinement (iterated to a pre-fixpoint), and the
// assume/assign operations the statement analyzer builds on.

#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absint/concrete_semantics.hpp"
#include "absint/domain_core.hpp"
#include "absint/imp_ast.hpp"

namespace absint {

/// Bot (unreachable), or one abstract value per program variable.
template <typename V>
class AMem {
public:
  static AMem bottom() { return AMem(); }

  static AMem from_entries(std::vector<V> entries) {
    AMem m;
    m.entries_ = std::move(entries);
    return m;
  }

  bool is_bottom() const { return !entries_.has_value(); }

  std::span<const V> entries() const {
    assert(!is_bottom());
    return *entries_;
  }

  const V& get(VarIndex v) const {
    assert(!is_bottom());
    return entries_->at(v);
  }

  bool operator==(const AMem& o) const { return entries_ == o.entries_; }
  bool operator!=(const AMem& o) const { return !(*this == o); }

  std::string str() const
    requires requires(const V& v) {
      { v.str() } -> std::convertible_to<std::string>;
    }
  {
    if (is_bottom()) return "bot";
    std::string out = "{";
    for (std::size_t i = 0; i < entries_->size(); ++i) {
      if (i) out += ", ";
      out += (*entries_)[i].str();
    }
    return out + "}";
  }

private:
  AMem() = default;

  std::optional<std::vector<V>> entries_;
};

/// Counters for the iterated backward analysis, kept per domain instance.
/// One analysis runs single-threaded; concurrent analyses use distinct
/// domain instances.
struct RefineCounters {
  std::uint64_t backward_steps = 0;
};

template <NumDomain D>
class MemoryDomain {
public:
  using NumValue = typename D::Value;
  using Value = AMem<NumValue>;
  using Concrete = ConcreteMem;

  MemoryDomain(D numeric, std::size_t nvars, Mutations mut = {})
      : num_(std::move(numeric)), nvars_(nvars), mut_(mut) {}

  const D& numeric() const { return num_; }
  std::size_t nvars() const { return nvars_; }

  // -- lattice ---------------------------------------------------------

  bool leq(const Value& x, const Value& y) const {
    if (x.is_bottom()) return true;
    if (y.is_bottom()) return false;
    for (std::size_t v = 0; v < nvars_; ++v)
      if (!num_.leq(x.entries()[v], y.entries()[v])) return false;
    return true;
  }

  Value join(const Value& x, const Value& y) const {
    if (x.is_bottom()) return y;
    if (y.is_bottom()) return x;
    return zip(x, y, [&](const NumValue& a, const NumValue& b) { return num_.join(a, b); });
  }

  /// Pointwise meet, reduced to Bot when any entry comes out empty.
  Value meet(const Value& x, const Value& y) const {
    if (x.is_bottom() || y.is_bottom()) return Value::bottom();
    Value m = zip(x, y, [&](const NumValue& a, const NumValue& b) { return num_.meet(a, b); });
    if (!mut_.skip_bottom_reduction) {
      for (const NumValue& e : m.entries())
        if (num_.leq(e, num_.bottom())) return Value::bottom();
    }
    return m;
  }

  Value bottom() const { return Value::bottom(); }

  Value top() const {
    return Value::from_entries(std::vector<NumValue>(nvars_, num_.top()));
  }

  Value widen(const Value& x, const Value& y) const {
    if (x.is_bottom()) return y;
    if (y.is_bottom()) return x;
    return zip(x, y, [&](const NumValue& a, const NumValue& b) { return num_.widen(a, b); });
  }

  // -- abstract domain --------------------------------------------------

  bool contains(const Value& m, const ConcreteMem& c) const {
    if (m.is_bottom()) return false;
    assert(c.values.size() == nvars_);
    for (std::size_t v = 0; v < nvars_; ++v)
      if (!num_.contains(m.entries()[v], c.values[v])) return false;
    return true;
  }

  Measure<Value> measure() const {
    const Measure<NumValue> elem = num_.measure();
    auto f = [elem, n = nvars_](const Value& m) -> Nat {
      if (m.is_bottom()) return 0;
      Nat total = 1;
      for (const NumValue& e : m.entries()) total += elem.f(e);
      return total;
    };
    // With zero variables the sole non-Bot memory still measures 1.
    const Nat slots = nvars_ == 0 ? 1 : Nat(nvars_);
    return Measure<Value>{std::move(f), 1 + elem.max * slots};
  }

  // -- memory operations -------------------------------------------------

  /// Pointwise replacement at one variable; Bot stays Bot.
  Value update(VarIndex v, NumValue x, const Value& m) const {
    if (m.is_bottom()) return m;
    std::vector<NumValue> entries(m.entries().begin(), m.entries().end());
    entries.at(v) = std::move(x);
    return Value::from_entries(std::move(entries));
  }

  /// Forward abstract evaluation of an expression in a memory.
  NumValue eval(const Value& m, const Expr& e) const {
    if (leq(m, bottom())) return num_.bottom();
    return std::visit(
        overloaded{
            [&](const ConstExpr& x) { return num_.constant(x.value); },
            [&](const UnknownExpr&) { return num_.top(); },
            [&](const VarExpr& x) { return m.get(x.var); },
            [&](const BinExpr& x) {
              return num_.forward(x.op, eval(m, *x.lhs), eval(m, *x.rhs));
            },
        },
        e.node);
  }

  /// One backward pass: the largest part of `m` this pass can justify under
  /// the hypothesis that `e` evaluates into `target`. Decreasing in `m`.
  Value refine(const Expr& e, const NumValue& target, const Value& m) const {
    if (leq(m, bottom())) return bottom();
    return std::visit(
        overloaded{
            [&](const ConstExpr& x) {
              return num_.contains(target, x.value) ? m : bottom();
            },
            [&](const UnknownExpr&) { return m; },
            [&](const VarExpr& x) {
              NumValue narrowed = num_.meet(target, m.get(x.var));
              if (num_.leq(narrowed, num_.bottom())) return bottom();
              return update(x.var, std::move(narrowed), m);
            },
            [&](const BinExpr& x) {
              auto [lhs_target, rhs_target] =
                  num_.backward(x.op, eval(m, *x.lhs), eval(m, *x.rhs), target);
              return meet(refine(*x.lhs, lhs_target, m), refine(*x.rhs, rhs_target, m));
            },
        },
        e.node);
  }

  /// Iterated backward refinement, run to a pre-fixpoint.
  Value refine_fp(const Expr& e, const NumValue& target, const Value& m) const {
    FixpointStats stats;
    Value r = prefixpoint([&](const Value& a, const Value& b) { return leq(a, b); }, measure(),
                          [&](const Value& x) { return refine(e, target, x); }, m, &stats);
    counters_.backward_steps += stats.steps;
    return r;
  }

  /// Keep only what can make `e` true: the join of refining under
  /// "e strictly positive" and "e strictly negative".
  Value assume(const Value& m, const Expr& e) const {
    Value pos = refine_fp(e, num_.positive(), m);
    if (mut_.assume_skips_negative_branch) return pos;
    return join(pos, refine_fp(e, num_.negative(), m));
  }

  Value assign(const Value& m, VarIndex v, const Expr& e) const {
    NumValue value = eval(m, e);
    if (num_.leq(value, num_.bottom())) return bottom();
    return update(v, std::move(value), m);
  }

  /// Every public operation keeps memories canonical: a non-Bot memory
  /// never holds an empty entry.
  bool canonical(const Value& m) const {
    if (m.is_bottom()) return true;
    for (const NumValue& e : m.entries())
      if (num_.leq(e, num_.bottom())) return false;
    return true;
  }

  const RefineCounters& counters() const { return counters_; }
  void reset_counters() const { counters_ = RefineCounters{}; }

private:
  template <typename F>
  Value zip(const Value& x, const Value& y, F&& fn) const {
    std::vector<NumValue> entries;
    entries.reserve(nvars_);
    for (std::size_t v = 0; v < nvars_; ++v) entries.push_back(fn(x.entries()[v], y.entries()[v]));
    return Value::from_entries(std::move(entries));
  }

  D num_;
  std::size_t nvars_;
  Mutations mut_;
  mutable RefineCounters counters_;
};

}  // namespace absint
