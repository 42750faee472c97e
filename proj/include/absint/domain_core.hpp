#pragma once

// The abstract-domain interface layer: lattice and abstract-domain concepts,
// the termination measure, and the two fixpoint engines.
//
// A domain is an *object*, not a type: bit width, thresholds and variable
// count are runtime configuration, so top/bottom and the operators live on
// a domain instance. Generic code takes the instance as a constrained
// template parameter.
//
// Orders are only required to be reflexive and transitive (no antisymmetry);
// both engines stop on order-equivalence (x <= f(x) together with the
// decreasing/increasing obligation). The obligations that a refinement type
// would enforce statically are checked dynamically: a step that goes the
// wrong way or a blown iteration bound throws FixpointError.

#include <concepts>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "absint/concrete_semantics.hpp"
#include "absint/imp_ast.hpp"
#include "absint/machine_int.hpp"

namespace absint {

/// Strictly monotone map into bounded naturals: x < y (strictly) implies
/// f(x) < f(y), and f(x) < max everywhere. Guarantees fixpoint termination.
template <typename T>
struct Measure {
  std::function<Nat(const T&)> f;
  Nat max;
};

template <typename D>
concept LatticeDomain = requires(const D d, const typename D::Value x, const typename D::Value y) {
  typename D::Value;
  { d.leq(x, y) } -> std::convertible_to<bool>;
  { d.join(x, y) } -> std::same_as<typename D::Value>;
  { d.meet(x, y) } -> std::same_as<typename D::Value>;
  { d.bottom() } -> std::same_as<typename D::Value>;
  { d.top() } -> std::same_as<typename D::Value>;
};

template <typename D>
concept AbstractDomain =
    LatticeDomain<D> &&
    requires(const D d, const typename D::Value x, const typename D::Value y,
             const typename D::Concrete c) {
      typename D::Concrete;
      { d.widen(x, y) } -> std::same_as<typename D::Value>;
      { d.contains(x, c) } -> std::convertible_to<bool>;
      { d.measure() } -> std::same_as<Measure<typename D::Value>>;
    };

/// Numeric domains abstract machine integers and carry sound forward and
/// backward transformers for every IMP operator, plus abstractions of the
/// strictly positive and strictly negative values.
template <typename D>
concept NumDomain =
    AbstractDomain<D> && std::same_as<typename D::Concrete, IntM> &&
    requires(const D d, const typename D::Value x, IntM n, BinOpKind op) {
      { d.constant(n) } -> std::same_as<typename D::Value>;
      { d.forward(op, x, x) } -> std::same_as<typename D::Value>;
      { d.backward(op, x, x, x) } -> std::same_as<std::pair<typename D::Value, typename D::Value>>;
      { d.positive() } -> std::same_as<typename D::Value>;
      { d.negative() } -> std::same_as<typename D::Value>;
    };

/// Memory domains abstract whole concrete memories and provide the two
/// statement-level operations the analyzer needs.
template <typename D>
concept MemDomain = AbstractDomain<D> && std::same_as<typename D::Concrete, ConcreteMem> &&
                    requires(const D d, const typename D::Value m, const Expr& e, VarIndex v) {
                      { d.assume(m, e) } -> std::same_as<typename D::Value>;
                      { d.assign(m, v, e) } -> std::same_as<typename D::Value>;
                    };

/// A fixpoint engine detected a broken domain instance (a step violated its
/// monotonicity obligation, or iteration outran the measure bound).
class FixpointError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct FixpointStats {
  std::uint64_t steps = 0;
};

/// Iterate a decreasing `f` from `x` until order-equivalence: returns y with
/// y <= x and y order-equivalent to f(y). Takes at most measure.f(x) + 1
/// applications of f.
template <typename T, typename LeqF, typename StepF>
T prefixpoint(LeqF&& leq, const Measure<T>& measure, StepF&& f, T x,
              FixpointStats* stats = nullptr) {
  const Nat bound = measure.f(x) + 1;
  Nat steps = 0;
  while (true) {
    if (++steps > bound) throw FixpointError("prefixpoint: exceeded measure iteration bound");
    T next = f(x);
    if (stats) ++stats->steps;
    if (!leq(next, x)) throw FixpointError("prefixpoint: step is not decreasing");
    if (leq(x, next)) return x;
    x = std::move(next);
  }
}

/// Iterate an increasing `f` from `x` until order-equivalence: returns y with
/// x <= y and f(y) <= y. Takes at most measure.max - measure.f(x) + 1
/// applications of f.
template <typename T, typename LeqF, typename StepF>
T postfixpoint(LeqF&& leq, const Measure<T>& measure, StepF&& f, T x,
               FixpointStats* stats = nullptr) {
  const Nat bound = measure.max - measure.f(x) + 1;
  Nat steps = 0;
  while (true) {
    if (++steps > bound) throw FixpointError("postfixpoint: exceeded measure iteration bound");
    T next = f(x);
    if (stats) ++stats->steps;
    if (!leq(x, next)) throw FixpointError("postfixpoint: step is not increasing");
    if (leq(next, x)) return x;
    x = std::move(next);
  }
}

/// Fault-injection switches for the harness's self-validation: each one
/// re-creates a documented unsoundness so the test batteries can prove they
/// would catch it. Production paths leave them all off.
struct Mutations {
  bool widen_returns_meet = false;
  bool skip_bottom_reduction = false;
  bool backward_lt_skips_increment_guard = false;
  bool negate_skips_min_guard = false;
  bool assume_skips_negative_branch = false;
  // not one of the documented five; exercises the battery's meet laws
  bool meet_returns_join = false;
};

}  // namespace absint
