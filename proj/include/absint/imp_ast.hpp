#pragma once

// IMP abstract syntax. Expressions are numeric (booleans are 0/1 encoded);
// statements are assignment, assumption, sequence, nondeterministic choice
// and loop, where `loop { s }` means "run s any number of times".
//
// Trees are immutable and shared; `?` (Unknown) denotes an arbitrary value.

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "absint/machine_int.hpp"

namespace absint {

using VarIndex = std::uint32_t;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ConstExpr {
  IntM value;
};
struct VarExpr {
  VarIndex var;
};
struct BinExpr {
  BinOpKind op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct UnknownExpr {};

struct Expr {
  std::variant<ConstExpr, VarExpr, BinExpr, UnknownExpr> node;

  static ExprPtr constant(IntM v) { return std::make_shared<Expr>(Expr{ConstExpr{v}}); }
  static ExprPtr variable(VarIndex v) { return std::make_shared<Expr>(Expr{VarExpr{v}}); }
  static ExprPtr binary(BinOpKind op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Expr{BinExpr{op, std::move(l), std::move(r)}});
  }
  static ExprPtr unknown() { return std::make_shared<Expr>(Expr{UnknownExpr{}}); }
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct AssignStmt {
  VarIndex var;
  ExprPtr expr;
};
struct AssumeStmt {
  ExprPtr expr;
};
struct SeqStmt {
  StmtPtr first;
  StmtPtr second;
};
struct ChoiceStmt {
  StmtPtr left;
  StmtPtr right;
};
struct LoopStmt {
  StmtPtr body;
};

struct Stmt {
  std::variant<AssignStmt, AssumeStmt, SeqStmt, ChoiceStmt, LoopStmt> node;

  static StmtPtr assign(VarIndex v, ExprPtr e) {
    return std::make_shared<Stmt>(Stmt{AssignStmt{v, std::move(e)}});
  }
  static StmtPtr assume(ExprPtr e) { return std::make_shared<Stmt>(Stmt{AssumeStmt{std::move(e)}}); }
  static StmtPtr seq(StmtPtr a, StmtPtr b) {
    return std::make_shared<Stmt>(Stmt{SeqStmt{std::move(a), std::move(b)}});
  }
  static StmtPtr choice(StmtPtr a, StmtPtr b) {
    return std::make_shared<Stmt>(Stmt{ChoiceStmt{std::move(a), std::move(b)}});
  }
  static StmtPtr loop(StmtPtr b) { return std::make_shared<Stmt>(Stmt{LoopStmt{std::move(b)}}); }
};

/// A statement together with its variable universe. Every VarIndex in the
/// body refers into `vars`; the order is first occurrence in the source.
struct Program {
  std::vector<std::string> vars;
  StmtPtr body;
  Width width = Width(64);
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const ConstExpr& x) { return x.value == std::get<ConstExpr>(b.node).value; },
          [&](const VarExpr& x) { return x.var == std::get<VarExpr>(b.node).var; },
          [&](const BinExpr& x) {
            const auto& y = std::get<BinExpr>(b.node);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const UnknownExpr&) { return true; },
      },
      a.node);
}

inline bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const AssignStmt& x) {
            const auto& y = std::get<AssignStmt>(b.node);
            return x.var == y.var && structurally_equal(*x.expr, *y.expr);
          },
          [&](const AssumeStmt& x) {
            return structurally_equal(*x.expr, *std::get<AssumeStmt>(b.node).expr);
          },
          [&](const SeqStmt& x) {
            const auto& y = std::get<SeqStmt>(b.node);
            return structurally_equal(*x.first, *y.first) &&
                   structurally_equal(*x.second, *y.second);
          },
          [&](const ChoiceStmt& x) {
            const auto& y = std::get<ChoiceStmt>(b.node);
            return structurally_equal(*x.left, *y.left) && structurally_equal(*x.right, *y.right);
          },
          [&](const LoopStmt& x) {
            return structurally_equal(*x.body, *std::get<LoopStmt>(b.node).body);
          },
      },
      a.node);
}

inline bool structurally_equal(const Program& a, const Program& b) {
  return a.width == b.width && a.vars == b.vars && structurally_equal(*a.body, *b.body);
}

/// Number of statement nodes.
inline std::size_t stmt_count(const Stmt& s) {
  return std::visit(overloaded{
                        [](const AssignStmt&) -> std::size_t { return 1; },
                        [](const AssumeStmt&) -> std::size_t { return 1; },
                        [](const SeqStmt& x) {
                          return 1 + stmt_count(*x.first) + stmt_count(*x.second);
                        },
                        [](const ChoiceStmt& x) {
                          return 1 + stmt_count(*x.left) + stmt_count(*x.right);
                        },
                        [](const LoopStmt& x) { return 1 + stmt_count(*x.body); },
                    },
                    s.node);
}

inline int loop_depth(const Stmt& s) {
  return std::visit(overloaded{
                        [](const AssignStmt&) { return 0; },
                        [](const AssumeStmt&) { return 0; },
                        [](const SeqStmt& x) {
                          return std::max(loop_depth(*x.first), loop_depth(*x.second));
                        },
                        [](const ChoiceStmt& x) {
                          return std::max(loop_depth(*x.left), loop_depth(*x.right));
                        },
                        [](const LoopStmt& x) { return 1 + loop_depth(*x.body); },
                    },
                    s.node);
}

/// Bitmask of variables read by an expression. Only meaningful for the
/// first 64 variables; the oracle's state budget keeps it well within that.
inline std::uint64_t used_vars(const Expr& e) {
  return std::visit(overloaded{
                        [](const ConstExpr&) -> std::uint64_t { return 0; },
                        [](const VarExpr& x) -> std::uint64_t {
                          assert(x.var < 64);
                          return std::uint64_t(1) << x.var;
                        },
                        [](const BinExpr& x) { return used_vars(*x.lhs) | used_vars(*x.rhs); },
                        [](const UnknownExpr&) -> std::uint64_t { return 0; },
                    },
                    e.node);
}

namespace detail {

inline int precedence(BinOpKind op) {
  switch (op) {
    case BinOpKind::Mult: return 5;
    case BinOpKind::Plus:
    case BinOpKind::Minus: return 4;
    case BinOpKind::Lt:
    case BinOpKind::Eq: return 3;
    case BinOpKind::And: return 2;
    case BinOpKind::Or: return 1;
  }
  return 0;
}

inline void print_expr(std::ostream& out, const Expr& e, const std::vector<std::string>& vars,
                       int parent_prec, bool right_child) {
  std::visit(overloaded{
                 [&](const ConstExpr& x) { out << x.value.value(); },
                 [&](const VarExpr& x) { out << vars.at(x.var); },
                 [&](const UnknownExpr&) { out << '?'; },
                 [&](const BinExpr& x) {
                   const int prec = precedence(x.op);
                   // Operators are left-associative: a right child at equal
                   // precedence needs parentheses to re-parse identically.
                   const bool parens = prec < parent_prec || (prec == parent_prec && right_child);
                   if (parens) out << '(';
                   print_expr(out, *x.lhs, vars, prec, false);
                   out << ' ' << binop_symbol(x.op) << ' ';
                   print_expr(out, *x.rhs, vars, prec, true);
                   if (parens) out << ')';
                 },
             },
             e.node);
}

inline void print_stmt(std::ostream& out, const Stmt& s, const std::vector<std::string>& vars,
                       int indent) {
  auto pad = [&] {
    for (int i = 0; i < indent; ++i) out << "  ";
  };
  std::visit(overloaded{
                 [&](const AssignStmt& x) {
                   pad();
                   out << vars.at(x.var) << " := ";
                   print_expr(out, *x.expr, vars, 0, false);
                 },
                 [&](const AssumeStmt& x) {
                   pad();
                   out << "assume ";
                   print_expr(out, *x.expr, vars, 0, false);
                 },
                 [&](const SeqStmt& x) {
                   print_stmt(out, *x.first, vars, indent);
                   out << ";\n";
                   print_stmt(out, *x.second, vars, indent);
                 },
                 [&](const ChoiceStmt& x) {
                   pad();
                   out << "choice {\n";
                   print_stmt(out, *x.left, vars, indent + 1);
                   out << '\n';
                   pad();
                   out << "} or {\n";
                   print_stmt(out, *x.right, vars, indent + 1);
                   out << '\n';
                   pad();
                   out << '}';
                 },
                 [&](const LoopStmt& x) {
                   pad();
                   out << "loop {\n";
                   print_stmt(out, *x.body, vars, indent + 1);
                   out << '\n';
                   pad();
                   out << '}';
                 },
             },
             s.node);
}

}  // namespace detail

/// Render a program in concrete syntax (core constructs only, no sugar).
/// Parsing the result yields a structurally identical program.
inline std::string pretty(const Program& p) {
  std::ostringstream out;
  detail::print_stmt(out, *p.body, p.vars, 0);
  out << '\n';
  return out.str();
}

inline std::string pretty_expr(const Expr& e, const std::vector<std::string>& vars) {
  std::ostringstream out;
  detail::print_expr(out, e, vars, 0, false);
  return out.str();
}

}  // namespace absint
