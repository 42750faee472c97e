#pragma once

// Executable concrete semantics of IMP, in two forms:
//
//  * exact: set-valued evaluation over explicit finite sets (ValueSet,
//    MemSet). The whole state space of a width-w program with n variables
//    has (2^w)^n memories, so this is the ground truth the analyzer is
//    tested against at small widths.
//
//  * sampled: a randomized executor (sample_run) that resolves the
//    nondeterminism with a seeded rng, usable at any width.
//
// Statement semantics is input/output: Assign updates one variable with any
// value of the expression, Assume keeps a memory iff the expression can be
// nonzero in it, Choice takes both branches, Loop is the reflexive-
// transitive closure of its body.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "absint/imp_ast.hpp"
#include "absint/machine_int.hpp"

namespace absint {

/// Thrown when an exact computation would need more states than allowed.
class StateBudgetError : public std::runtime_error {
public:
  StateBudgetError(Nat required, Nat allowed)
      : std::runtime_error("state budget exceeded: need " + to_string_i128(i128(required)) +
                           " states, allowed " + to_string_i128(i128(allowed))),
        required_(required),
        allowed_(allowed) {}

  Nat required() const { return required_; }
  Nat allowed() const { return allowed_; }

private:
  Nat required_;
  Nat allowed_;
};

inline constexpr Nat default_state_budget = Nat(1) << 24;

/// Finite set of machine integers of one width, as a dense bitset.
class ValueSet {
public:
  explicit ValueSet(Width width, Nat budget = default_state_budget) : width_(width) {
    const Nat n = width.value_count();
    if (n > budget) throw StateBudgetError(n, budget);
    bits_.assign((std::size_t(n) + 63) / 64, 0);
  }

  static ValueSet empty(Width w) { return ValueSet(w); }

  static ValueSet full(Width w) {
    ValueSet s(w);
    const std::size_t n = std::size_t(w.value_count());
    for (std::size_t i = 0; i < n; ++i) s.bits_[i >> 6] |= std::uint64_t(1) << (i & 63);
    return s;
  }

  static ValueSet singleton(IntM v) {
    ValueSet s(v.width());
    s.add(v);
    return s;
  }

  Width width() const { return width_; }

  void add(IntM v) {
    const std::size_t i = index_of(v.value());
    bits_[i >> 6] |= std::uint64_t(1) << (i & 63);
  }

  bool contains(IntM v) const {
    if (v.width() != width_) return false;
    const std::size_t i = index_of(v.value());
    return (bits_[i >> 6] >> (i & 63)) & 1;
  }

  bool contains_nonzero() const {
    const std::size_t zero = index_of(0);
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      if ((zero >> 6) == w) word &= ~(std::uint64_t(1) << (zero & 63));
      if (word != 0) return true;
    }
    return false;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += std::size_t(__builtin_popcountll(w));
    return c;
  }

  bool empty() const {
    for (std::uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  ValueSet& unite(const ValueSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }

  ValueSet& intersect(const ValueSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
    return *this;
  }

  ValueSet& subtract(const ValueSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
    return *this;
  }

  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int bit = __builtin_ctzll(word);
        word &= word - 1;
        fn(IntM(value_at(w * 64 + std::size_t(bit)), width_));
      }
    }
  }

  bool operator==(const ValueSet& o) const { return width_ == o.width_ && bits_ == o.bits_; }

private:
  std::size_t index_of(std::int64_t v) const {
    return std::size_t(i128(v) - i128(width_.min_value()));
  }
  std::int64_t value_at(std::size_t i) const {
    return std::int64_t(i128(width_.min_value()) + i128(i));
  }

  Width width_;
  std::vector<std::uint64_t> bits_;
};

/// A total assignment of machine integers to the program's variables.
struct ConcreteMem {
  std::vector<IntM> values;

  IntM get(VarIndex v) const { return values.at(v); }
  void set(VarIndex v, IntM x) { values.at(v) = x; }
  bool operator==(const ConcreteMem& o) const { return values == o.values; }

  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(values[i].value());
    }
    return out + ")";
  }
};

/// { op(va, vb) | va in a, vb in b }
inline ValueSet lift_binop(BinOpKind op, const ValueSet& a, const ValueSet& b) {
  assert(a.width() == b.width());
  ValueSet out(a.width());
  a.for_each([&](IntM va) { b.for_each([&](IntM vb) { out.add(concrete_binop(op, va, vb)); }); });
  return out;
}

/// Set of values an expression can take in one memory: constants and
/// variables are singletons, `?` is everything, operators are lifted.
inline ValueSet eval_expr(const ConcreteMem& m, const Expr& e, Width w) {
  return std::visit(
      overloaded{
          [&](const ConstExpr& x) { return ValueSet::singleton(x.value); },
          [&](const VarExpr& x) { return ValueSet::singleton(m.get(x.var)); },
          [&](const UnknownExpr&) { return ValueSet::full(w); },
          [&](const BinExpr& x) {
            return lift_binop(x.op, eval_expr(m, *x.lhs, w), eval_expr(m, *x.rhs, w));
          },
      },
      e.node);
}

/// Finite set of concrete memories, as a dense bitset over packed state
/// indices (one base-2^bits digit per variable, variable 0 least
/// significant).
class MemSet {
public:
  MemSet(Width width, std::size_t nvars, Nat budget = default_state_budget)
      : width_(width), nvars_(nvars) {
    const Nat per_var = width.value_count();
    Nat states = 1;
    for (std::size_t i = 0; i < nvars; ++i) {
      if (states > budget / per_var) throw StateBudgetError(states * per_var, budget);
      states *= per_var;
    }
    state_count_ = std::size_t(states);
    bits_.assign((state_count_ + 63) / 64, 0);
  }

  static MemSet all(Width w, std::size_t nvars, Nat budget = default_state_budget) {
    MemSet s(w, nvars, budget);
    for (std::size_t i = 0; i < s.state_count_; ++i)
      s.bits_[i >> 6] |= std::uint64_t(1) << (i & 63);
    return s;
  }

  Width width() const { return width_; }
  std::size_t nvars() const { return nvars_; }
  std::size_t state_count() const { return state_count_; }

  std::size_t encode(const ConcreteMem& m) const {
    assert(m.values.size() == nvars_);
    std::size_t idx = 0;
    for (std::size_t v = nvars_; v-- > 0;)
      idx = idx * std::size_t(width_.value_count()) + digit_of(m.values[v].value());
    return idx;
  }

  ConcreteMem decode(std::size_t idx) const {
    ConcreteMem m;
    m.values.reserve(nvars_);
    const std::size_t base = std::size_t(width_.value_count());
    for (std::size_t v = 0; v < nvars_; ++v) {
      m.values.push_back(IntM(value_of(idx % base), width_));
      idx /= base;
    }
    return m;
  }

  void add_index(std::size_t i) { bits_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool contains_index(std::size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
  void add(const ConcreteMem& m) { add_index(encode(m)); }
  bool contains(const ConcreteMem& m) const { return contains_index(encode(m)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += std::size_t(__builtin_popcountll(w));
    return c;
  }

  bool empty() const {
    for (std::uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  MemSet& unite(const MemSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }

  MemSet& subtract(const MemSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
    return *this;
  }

  bool includes(const MemSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (o.bits_[i] & ~bits_[i]) return false;
    return true;
  }

  template <typename F>
  void for_each_index(F&& fn) const {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int bit = __builtin_ctzll(word);
        word &= word - 1;
        fn(w * 64 + std::size_t(bit));
      }
    }
  }

  bool operator==(const MemSet& o) const {
    return width_ == o.width_ && nvars_ == o.nvars_ && bits_ == o.bits_;
  }

  /// Packed index digit for variable v inside a state index.
  std::size_t digit(std::size_t idx, VarIndex v) const {
    const std::size_t base = std::size_t(width_.value_count());
    for (VarIndex i = 0; i < v; ++i) idx /= base;
    return idx % base;
  }

  std::size_t replace_digit(std::size_t idx, VarIndex v, std::size_t digit_value) const {
    const std::size_t base = std::size_t(width_.value_count());
    std::size_t stride = 1;
    for (VarIndex i = 0; i < v; ++i) stride *= base;
    const std::size_t old = (idx / stride) % base;
    return idx - old * stride + digit_value * stride;
  }

  std::size_t digit_of(std::int64_t value) const {
    return std::size_t(i128(value) - i128(width_.min_value()));
  }
  std::int64_t value_of(std::size_t digit_value) const {
    return std::int64_t(i128(width_.min_value()) + i128(digit_value));
  }

private:
  Width width_;
  std::size_t nvars_;
  std::size_t state_count_;
  std::vector<std::uint64_t> bits_;
};

namespace detail {

// Evaluation cache for one statement application: expression results only
// depend on the variables the expression reads, so memories sharing that
// projection share the result.
class ExprEvalCache {
public:
  ExprEvalCache(const Expr& e, const MemSet& space) : expr_(e), space_(space) {
    mask_ = used_vars(e);
  }

  const ValueSet& eval(std::size_t mem_index) {
    std::uint64_t key = 0;
    const std::size_t base = std::size_t(space_.width().value_count());
    std::uint64_t mask = mask_;
    std::size_t idx = mem_index;
    std::uint64_t mul = 1;
    while (mask) {
      if (mask & 1) {
        key += std::uint64_t(idx % base) * mul;
        mul *= base;
      }
      idx /= base;
      mask >>= 1;
    }
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const ConcreteMem mem = space_.decode(mem_index);
    return cache_.emplace(key, eval_expr(mem, expr_, space_.width())).first->second;
  }

private:
  const Expr& expr_;
  const MemSet& space_;
  std::uint64_t mask_;
  std::unordered_map<std::uint64_t, ValueSet> cache_;
};

}  // namespace detail

/// All memories reachable from `inputs` by executing `s` once. Loops are
/// closed by a frontier iteration: each body pass runs only on states not
/// seen before, so the cost is linear in the reachable states.
inline MemSet post_image(const Stmt& s, const MemSet& inputs) {
  return std::visit(
      overloaded{
          [&](const AssignStmt& x) {
            MemSet out(inputs.width(), inputs.nvars());
            detail::ExprEvalCache cache(*x.expr, inputs);
            inputs.for_each_index([&](std::size_t idx) {
              cache.eval(idx).for_each([&](IntM value) {
                out.add_index(inputs.replace_digit(idx, x.var, inputs.digit_of(value.value())));
              });
            });
            return out;
          },
          [&](const AssumeStmt& x) {
            MemSet out(inputs.width(), inputs.nvars());
            detail::ExprEvalCache cache(*x.expr, inputs);
            inputs.for_each_index([&](std::size_t idx) {
              if (cache.eval(idx).contains_nonzero()) out.add_index(idx);
            });
            return out;
          },
          [&](const SeqStmt& x) { return post_image(*x.second, post_image(*x.first, inputs)); },
          [&](const ChoiceStmt& x) {
            MemSet out = post_image(*x.left, inputs);
            out.unite(post_image(*x.right, inputs));
            return out;
          },
          [&](const LoopStmt& x) {
            MemSet visited = inputs;
            MemSet frontier = inputs;
            while (!frontier.empty()) {
              MemSet next = post_image(*x.body, frontier);
              next.subtract(visited);
              visited.unite(next);
              frontier = std::move(next);
            }
            return visited;
          },
      },
      s.node);
}

/// Outcome of one randomized run.
struct SampleResult {
  enum class Status { Ok, NoWitness, FuelExhausted };
  Status status;
  ConcreteMem memory;

  bool ok() const { return status == Status::Ok; }
};

namespace detail {

class Sampler {
public:
  Sampler(std::uint64_t seed, Width w, int fuel, int assume_retries)
      : rng_(seed), width_(w), fuel_(fuel), assume_retries_(assume_retries) {}

  /// Backtracking wrapper: a run that dies on an assume restarts from the
  /// initial memory with fresh randomness, within the shared fuel budget.
  SampleResult sample(const Stmt& s, const ConcreteMem& m) {
    SampleResult last{SampleResult::Status::NoWitness, m};
    for (int attempt = 0; attempt <= assume_retries_; ++attempt) {
      last = run(s, m);
      if (last.status != SampleResult::Status::NoWitness) return last;
    }
    return last;
  }

  SampleResult run(const Stmt& s, ConcreteMem m) {
    using Status = SampleResult::Status;
    if (fuel_-- <= 0) return {Status::FuelExhausted, std::move(m)};
    return std::visit(
        overloaded{
            [&](const AssignStmt& x) {
              m.set(x.var, sample_expr(*x.expr, m));
              return SampleResult{Status::Ok, std::move(m)};
            },
            [&](const AssumeStmt& x) {
              for (int i = 0; i <= assume_retries_; ++i)
                if (sample_expr(*x.expr, m).value() != 0) return SampleResult{Status::Ok, std::move(m)};
              return SampleResult{Status::NoWitness, std::move(m)};
            },
            [&](const SeqStmt& x) {
              SampleResult r = run(*x.first, std::move(m));
              if (!r.ok()) return r;
              return run(*x.second, std::move(r.memory));
            },
            [&](const ChoiceStmt& x) {
              return run(rng_() & 1 ? *x.left : *x.right, std::move(m));
            },
            [&](const LoopStmt& x) {
              // Zero or more body iterations, geometrically distributed.
              // A body run that dies on an assume is dropped: the
              // iterations completed so far already form a valid run.
              while (rng_() & 1) {
                SampleResult r = run(*x.body, m);
                if (r.status == Status::FuelExhausted) return r;
                if (r.status == Status::NoWitness) break;
                m = std::move(r.memory);
              }
              return SampleResult{Status::Ok, std::move(m)};
            },
        },
        s.node);
  }

private:
  IntM sample_expr(const Expr& e, const ConcreteMem& m) {
    return std::visit(
        overloaded{
            [&](const ConstExpr& x) { return x.value; },
            [&](const VarExpr& x) { return m.get(x.var); },
            [&](const UnknownExpr&) {
              const u128 span = u128(width_.value_count());
              return IntM(std::int64_t(i128(width_.min_value()) + i128(rng_() % span)), width_);
            },
            [&](const BinExpr& x) {
              return concrete_binop(x.op, sample_expr(*x.lhs, m), sample_expr(*x.rhs, m));
            },
        },
        e.node);
  }

  std::mt19937_64 rng_;
  Width width_;
  int fuel_;
  int assume_retries_;
};

}  // namespace detail

/// One randomized execution of `s` from `m`. Any returned memory is a
/// member of the exact post_image; an assume that keeps sampling zero is
/// reported as NoWitness rather than an error.
inline SampleResult sample_run(const Stmt& s, ConcreteMem m, std::uint64_t seed, Width width,
                               int fuel = 10000, int assume_retries = 16) {
  return detail::Sampler(seed, width, fuel, assume_retries).sample(s, m);
}

}  // namespace absint
