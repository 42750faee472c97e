#pragma once

// Seeded random program generator. Fuel for the differential harness: the
// distribution leans on assignments and assumptions, draws constants near
// 0, the width extremes and the widening thresholds, and caps loop nesting
// at two so the concrete oracle stays cheap.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "absint/imp_ast.hpp"
#include "absint/machine_int.hpp"

namespace absint {

class ProgramGenerator {
public:
  ProgramGenerator(std::uint64_t seed, int size_budget, int nvars, Width width)
      : rng_(seed), width_(width), nvars_(nvars) {
    if (size_budget < 1) throw std::invalid_argument("size_budget must be >= 1");
    if (nvars < 1 || nvars > 8) throw std::invalid_argument("nvars must be in 1..8");
    budget_ = size_budget;
    const std::int64_t lo = width.min_value();
    const std::int64_t hi = width.max_value();
    for (std::int64_t c : {std::int64_t(0), std::int64_t(1), std::int64_t(2), std::int64_t(-1),
                           std::int64_t(-2), lo, hi, lo + 1, hi - 1})
      if (inbounds(c, width)) constant_pool_.push_back(c);
    for (std::int64_t t : {-64, -32, -16, -8, -4, 4, 8, 16, 32, 64})
      if (inbounds(t, width)) constant_pool_.push_back(t);
  }

  Program generate() {
    // Normalize the tree the way the parser would build it: sequences nest
    // to the right (';' is right-associative) and variables are numbered in
    // first-occurrence order with unused ones dropped. This keeps
    // parse(pretty(p)) structurally identical to p.
    StmtPtr body = reassociate(gen_stmt(budget_, 0));
    std::vector<std::optional<VarIndex>> remap(static_cast<std::size_t>(nvars_), std::nullopt);
    std::vector<std::string> names;
    collect_order(*body, remap, names);
    return Program{std::move(names), renumber(*body, remap), width_};
  }

private:
  // mt19937_64 is fully specified; drawing by modulo keeps the stream
  // identical across standard libraries (uniform_int_distribution is not).
  int roll(int n) { return int(rng_() % std::uint64_t(n)); }

  VarIndex pick_var() { return VarIndex(roll(nvars_)); }

  ExprPtr pick_const() {
    // Mostly pool constants (extremes and thresholds); sometimes uniform.
    std::int64_t v;
    if (roll(4) != 0) {
      v = constant_pool_[std::size_t(roll(int(constant_pool_.size())))];
    } else {
      const u128 span = u128(i128(width_.max_value()) - i128(width_.min_value()) + 1);
      v = std::int64_t(i128(width_.min_value()) + i128(rng_() % span));
    }
    return Expr::constant(IntM(v, width_));
  }

  ExprPtr gen_expr(int depth) {
    const int r = roll(100);
    if (depth <= 0 || r < 35) return r % 2 == 0 ? pick_const() : Expr::variable(pick_var());
    if (r < 55) return Expr::variable(pick_var());
    if (r < 65) return Expr::unknown();
    BinOpKind op = all_binops[std::size_t(roll(int(all_binops.size())))];
    return Expr::binary(op, gen_expr(depth - 1), gen_expr(depth - 1));
  }

  StmtPtr gen_leaf() {
    if (roll(3) == 0) return Stmt::assume(gen_expr(2));
    return Stmt::assign(pick_var(), gen_expr(2));
  }

  StmtPtr gen_stmt(int budget, int loop_nesting) {
    if (budget <= 1) return gen_leaf();
    const int r = roll(100);
    if (r < 40) return Stmt::assign(pick_var(), gen_expr(3));
    if (r < 60) return Stmt::assume(gen_expr(3));
    if (r < 80 && budget >= 3) {
      const int left = 1 + roll(budget - 2);
      return Stmt::seq(gen_stmt(left, loop_nesting), gen_stmt(budget - 1 - left, loop_nesting));
    }
    if (r < 90 && budget >= 3) {
      const int left = 1 + roll(budget - 2);
      return Stmt::choice(gen_stmt(left, loop_nesting), gen_stmt(budget - 1 - left, loop_nesting));
    }
    if (loop_nesting < 2) return Stmt::loop(gen_stmt(budget - 1, loop_nesting + 1));
    return gen_leaf();
  }

  static void flatten_seq(const StmtPtr& s, std::vector<StmtPtr>& out) {
    if (const auto* seq = std::get_if<SeqStmt>(&s->node)) {
      flatten_seq(seq->first, out);
      flatten_seq(seq->second, out);
    } else {
      out.push_back(s);
    }
  }

  static StmtPtr reassociate(StmtPtr s) {
    return std::visit(
        overloaded{
            [&](const AssignStmt&) { return s; },
            [&](const AssumeStmt&) { return s; },
            [&](const SeqStmt&) {
              std::vector<StmtPtr> items;
              flatten_seq(s, items);
              for (StmtPtr& item : items) item = reassociate(std::move(item));
              StmtPtr acc = items.back();
              for (std::size_t i = items.size() - 1; i-- > 0;)
                acc = Stmt::seq(items[i], std::move(acc));
              return acc;
            },
            [&](const ChoiceStmt& x) {
              return Stmt::choice(reassociate(x.left), reassociate(x.right));
            },
            [&](const LoopStmt& x) { return Stmt::loop(reassociate(x.body)); },
        },
        s->node);
  }

  void note_var(VarIndex v, std::vector<std::optional<VarIndex>>& remap,
                std::vector<std::string>& names) const {
    if (remap[v]) return;
    remap[v] = VarIndex(names.size());
    names.push_back(std::string(1, char('a' + v)));
  }

  void collect_order(const Expr& e, std::vector<std::optional<VarIndex>>& remap,
                     std::vector<std::string>& names) const {
    std::visit(overloaded{
                   [&](const ConstExpr&) {},
                   [&](const UnknownExpr&) {},
                   [&](const VarExpr& x) { note_var(x.var, remap, names); },
                   [&](const BinExpr& x) {
                     collect_order(*x.lhs, remap, names);
                     collect_order(*x.rhs, remap, names);
                   },
               },
               e.node);
  }

  void collect_order(const Stmt& s, std::vector<std::optional<VarIndex>>& remap,
                     std::vector<std::string>& names) const {
    std::visit(overloaded{
                   [&](const AssignStmt& x) {
                     note_var(x.var, remap, names);
                     collect_order(*x.expr, remap, names);
                   },
                   [&](const AssumeStmt& x) { collect_order(*x.expr, remap, names); },
                   [&](const SeqStmt& x) {
                     collect_order(*x.first, remap, names);
                     collect_order(*x.second, remap, names);
                   },
                   [&](const ChoiceStmt& x) {
                     collect_order(*x.left, remap, names);
                     collect_order(*x.right, remap, names);
                   },
                   [&](const LoopStmt& x) { collect_order(*x.body, remap, names); },
               },
               s.node);
  }

  ExprPtr renumber(const Expr& e, const std::vector<std::optional<VarIndex>>& remap) const {
    return std::visit(
        overloaded{
            [&](const ConstExpr& x) { return Expr::constant(x.value); },
            [&](const UnknownExpr&) { return Expr::unknown(); },
            [&](const VarExpr& x) { return Expr::variable(*remap[x.var]); },
            [&](const BinExpr& x) {
              return Expr::binary(x.op, renumber(*x.lhs, remap), renumber(*x.rhs, remap));
            },
        },
        e.node);
  }

  StmtPtr renumber(const Stmt& s, const std::vector<std::optional<VarIndex>>& remap) const {
    return std::visit(
        overloaded{
            [&](const AssignStmt& x) {
              return Stmt::assign(*remap[x.var], renumber(*x.expr, remap));
            },
            [&](const AssumeStmt& x) { return Stmt::assume(renumber(*x.expr, remap)); },
            [&](const SeqStmt& x) {
              return Stmt::seq(renumber(*x.first, remap), renumber(*x.second, remap));
            },
            [&](const ChoiceStmt& x) {
              return Stmt::choice(renumber(*x.left, remap), renumber(*x.right, remap));
            },
            [&](const LoopStmt& x) { return Stmt::loop(renumber(*x.body, remap)); },
        },
        s.node);
  }

  std::mt19937_64 rng_;
  Width width_;
  int nvars_;
  int budget_;
  std::vector<std::int64_t> constant_pool_;
};

/// Deterministic in `seed`; statement count <= size_budget; loop nesting <= 2;
/// all constants inbounds for `width`.
inline Program generate_program(std::uint64_t seed, int size_budget, int nvars, Width width) {
  return ProgramGenerator(seed, size_budget, nvars, width).generate();
}

}  // namespace absint
